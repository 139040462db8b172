export { SessionClient, ServiceError } from "./client.js";
export type { FetchLike } from "./client.js";
export { renderFrame } from "./render.js";
export { Playground } from "./app.js";
export type {
  Axis,
  AxisTick,
  Diagnostic,
  FrameDocument,
  FrameItem,
  SessionEvent,
  SessionInfo,
  WidgetDescriptor,
} from "./types.js";
