/** Wire protocol types for the session service. */

export interface WidgetDescriptor {
  id: string;
  kind: "range-slider" | "checkbox";
  target: string;
  label: string;
  min?: number;
  max?: number;
  step?: number;
  value: number | boolean | null;
}

export interface FrameItem {
  kind: "circle" | "rect" | "line" | "text";
  key: unknown;
  x: number;
  y: number;
  opacity: number;
  x2?: number;
  y2?: number;
  r?: number;
  fill?: string;
  stroke?: string;
  text?: string;
  tooltip?: unknown;
  points?: [number, number][];
  clipped?: boolean;
}

export interface AxisTick {
  pos: number;
  label: string;
}

export interface Axis {
  orient: "bottom" | "left";
  scale: string;
  domain: unknown[];
  ticks: AxisTick[];
}

export interface FrameDocument {
  width: number;
  height: number;
  items: FrameItem[];
  axes: Axis[];
  widgets: WidgetDescriptor[];
}

export interface SessionInfo {
  session_id: string;
  widgets: WidgetDescriptor[];
  cycle_ms: number;
}

export type SessionEvent =
  | { type: "widget_set"; widget: string; value: number | boolean }
  | { type: "click" | "pointermove"; x: number; y: number; modifiers?: string[] }
  | { type: "timer"; dt: number };

export interface Diagnostic {
  severity: string;
  path: string;
  message: string;
}
