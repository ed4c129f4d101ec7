import { describe, expect, it } from "vitest";

import {
  ProtocolError,
  collectIds,
  encodeClientMsg,
  findByKind,
  parseServerMsg,
} from "../src/protocol.js";

const FRAME = JSON.stringify({
  type: "display",
  root: {
    id: 2,
    kind: "screen",
    props: { x: 50 },
    children: [{ id: 0, kind: "button", props: { label: "PUSHME" }, children: [] }],
  },
});

describe("parseServerMsg", () => {
  it("accepts display frames", () => {
    const msg = parseServerMsg(FRAME);
    expect(msg.type).toBe("display");
    if (msg.type === "display") {
      expect(msg.root?.children[0].props.label).toBe("PUSHME");
    }
  });

  it("accepts empty displays", () => {
    const msg = parseServerMsg('{"type":"display","root":null}');
    expect(msg).toEqual({ type: "display", root: null });
  });

  it("accepts error messages", () => {
    expect(parseServerMsg('{"type":"error","message":"bad"}')).toEqual({
      type: "error",
      message: "bad",
    });
  });

  it("rejects garbage", () => {
    expect(() => parseServerMsg("not json")).toThrow(ProtocolError);
    expect(() => parseServerMsg('{"type":"display","root":{"id":"x"}}')).toThrow(
      ProtocolError
    );
    expect(() => parseServerMsg('{"type":"mystery"}')).toThrow(ProtocolError);
  });
});

describe("tree helpers", () => {
  it("collects every id", () => {
    const msg = parseServerMsg(FRAME);
    if (msg.type !== "display") throw new Error("unreachable");
    expect([...collectIds(msg.root)].sort()).toEqual([0, 2]);
    expect(collectIds(null).size).toBe(0);
  });

  it("finds nodes by kind", () => {
    const msg = parseServerMsg(FRAME);
    if (msg.type !== "display") throw new Error("unreachable");
    expect(findByKind(msg.root, "button")).toHaveLength(1);
    expect(findByKind(msg.root, "label")).toHaveLength(0);
  });
});

describe("encodeClientMsg", () => {
  it("round-trips through JSON", () => {
    const line = encodeClientMsg({ type: "event", target: 3, name: "push", args: [3] });
    expect(JSON.parse(line)).toEqual({ type: "event", target: 3, name: "push", args: [3] });
  });
});
