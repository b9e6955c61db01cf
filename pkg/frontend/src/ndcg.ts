/** Client-side NDCG@k so ranking-list headers update instantly when the
 * list-length slider moves, without a server round-trip.
 *
 * Relevance is graded by position in the reference (ideal) list:
 * grade = k − position, gain 2^grade − 1, log2 position discount. Items
 * absent from the reference prefix contribute zero gain.
 */

export function dcg(grades: readonly number[]): number {
  let total = 0;
  for (let i = 0; i < grades.length; i++) {
    total += (Math.pow(2, grades[i]) - 1) / Math.log2(i + 2);
  }
  return total;
}

export function ndcgAtK(
  ranked: readonly number[],
  reference: readonly number[],
  k: number,
): number {
  const kk = Math.min(k, ranked.length, reference.length);
  if (kk <= 0) return 1;
  const gradeOf = new Map<number, number>();
  for (let i = 0; i < kk; i++) gradeOf.set(reference[i], kk - i);
  const grades: number[] = [];
  for (let i = 0; i < kk; i++) grades.push(gradeOf.get(ranked[i]) ?? 0);
  const ideal: number[] = [];
  for (let i = 0; i < kk; i++) ideal.push(kk - i);
  const idealDcg = dcg(ideal);
  return idealDcg === 0 ? 1 : dcg(grades) / idealDcg;
}
