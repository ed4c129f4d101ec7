/** Wire protocol shared with the server: one JSON object per message. */

export interface DisplayNode {
  id: number;
  kind: string;
  props: Record<string, unknown>;
  children: DisplayNode[];
}

export type ServerMsg =
  | { type: "display"; root: DisplayNode | null }
  | { type: "error"; message: string };

export type ClientMsg =
  | { type: "event"; target: number; name: string; args: unknown[] }
  | { type: "set-field"; target: number; field: string; text: string }
  | { type: "end" };

export class ProtocolError extends Error {}

function isNode(v: unknown): v is DisplayNode {
  if (typeof v !== "object" || v === null) return false;
  const n = v as Record<string, unknown>;
  return (
    typeof n.id === "number" &&
    typeof n.kind === "string" &&
    typeof n.props === "object" &&
    n.props !== null &&
    Array.isArray(n.children) &&
    n.children.every(isNode)
  );
}

/** Parse one line from the server, rejecting anything off-protocol. */
export function parseServerMsg(line: string): ServerMsg {
  let data: unknown;
  try {
    data = JSON.parse(line);
  } catch {
    throw new ProtocolError(`not JSON: ${line.slice(0, 80)}`);
  }
  if (typeof data !== "object" || data === null) {
    throw new ProtocolError("message must be an object");
  }
  const msg = data as Record<string, unknown>;
  if (msg.type === "display") {
    if (msg.root === null) return { type: "display", root: null };
    if (isNode(msg.root)) return { type: "display", root: msg.root };
    throw new ProtocolError("display frame has a malformed root");
  }
  if (msg.type === "error" && typeof msg.message === "string") {
    return { type: "error", message: msg.message };
  }
  throw new ProtocolError(`unknown server message ${String(msg.type)}`);
}

export function encodeClientMsg(msg: ClientMsg): string {
  return JSON.stringify(msg);
}

/** Every id in the tree, depth first. */
export function collectIds(root: DisplayNode | null): Set<number> {
  const out = new Set<number>();
  const walk = (n: DisplayNode) => {
    out.add(n.id);
    n.children.forEach(walk);
  };
  if (root) walk(root);
  return out;
}

export function findByKind(root: DisplayNode | null, kind: string): DisplayNode[] {
  const out: DisplayNode[] = [];
  const walk = (n: DisplayNode) => {
    if (n.kind === kind) out.push(n);
    n.children.forEach(walk);
  };
  if (root) walk(root);
  return out;
}
