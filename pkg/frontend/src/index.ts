export { SelectionStore, MAX_SPACES } from "./state.js";
export type { SelectionState, BrushRange, LassoPolygon } from "./state.js";
export {
  WorkbenchClient,
  ProjectionStream,
  SseParser,
  ApiError,
} from "./api.js";
export type {
  DatasetInfo,
  GraphPayload,
  MetricsPayload,
  JobRequest,
  JobInfo,
  RankingListPayload,
  RegressionPayload,
  StructurePayload,
  ProjectionSnapshot,
} from "./api.js";
export * from "./geometry.js";
export { dcg, ndcgAtK } from "./ndcg.js";
export { ClusterTransitionView, axisScale } from "./views/pcp.js";
export {
  RankingView,
  computeColumns,
  neighborBars,
  DEFAULT_LIST_LENGTH,
} from "./views/ranking.js";
export { StructuralView, dimmedDimensions, LOW_SUPPORT_THRESHOLD } from "./views/structural.js";
export { GraphView, circularLayout, adjacencyOf } from "./views/graph.js";
export { ProjectionView } from "./views/projection.js";
