import { describe, expect, test } from "vitest";

import { renderFrame } from "../src/render.js";
import type { FrameDocument } from "../src/types.js";
import { fixture, fixtureText } from "./stub-service.js";

describe("renderFrame", () => {
  test("matches the service SVG byte for byte on a pinned circle frame", () => {
    const doc = fixture<FrameDocument>("frame_initial");
    expect(renderFrame(doc)).toBe(fixtureText("frame_initial.svg"));
  });

  test("matches the service SVG byte for byte on a pinned bar frame", () => {
    const doc = fixture<FrameDocument>("frame_barrace_750");
    expect(renderFrame(doc)).toBe(fixtureText("frame_barrace_750.svg"));
  });

  test("is a pure function of the document", () => {
    const doc = fixture<FrameDocument>("frame_scrub_1995");
    expect(renderFrame(doc)).toBe(renderFrame(doc));
  });

  test("escapes text content", () => {
    const doc: FrameDocument = {
      width: 100,
      height: 100,
      axes: [],
      widgets: [],
      items: [
        {
          kind: "text",
          key: "t",
          x: 10,
          y: 10,
          opacity: 1,
          fill: "#000",
          text: 'a<b & "c"',
        },
      ],
    };
    const svg = renderFrame(doc);
    expect(svg).toContain("a&lt;b &amp; &quot;c&quot;");
  });

  test("omits opacity attribute when fully opaque", () => {
    const doc = fixture<FrameDocument>("frame_initial");
    expect(renderFrame(doc)).not.toContain("opacity=");
    const dimmed: FrameDocument = {
      ...doc,
      items: doc.items.map((i) => ({ ...i, opacity: 0.4 })),
    };
    expect(renderFrame(dimmed)).toContain('opacity="0.400"');
  });
});
