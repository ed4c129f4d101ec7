/** WebSocket transport. The server upgrades in place, so the same port that
 * serves newline-delimited JSON to headless clients serves browsers too. */

import { ClientMsg, ServerMsg, encodeClientMsg, parseServerMsg } from "./protocol.js";

export interface Connection {
  send(msg: ClientMsg): boolean;
  close(): void;
}

export interface ConnectionEvents {
  onMessage(msg: ServerMsg): void;
  onOpen?(): void;
  onClose?(): void;
}

/** Minimal shape of a socket so tests can substitute a fake. */
export interface SocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev: unknown) => void) | null;
}

const OPEN = 1;

export function wireUp(ws: SocketLike, events: ConnectionEvents): Connection {
  ws.onopen = () => events.onOpen?.();
  ws.onclose = () => events.onClose?.();
  ws.onmessage = (ev) => {
    if (typeof ev.data !== "string") return;
    // tolerate several newline-delimited messages per websocket frame
    for (const line of ev.data.split("\n")) {
      if (line.trim() === "") continue;
      events.onMessage(parseServerMsg(line));
    }
  };
  return {
    send(msg) {
      if (ws.readyState !== OPEN) return false;
      ws.send(encodeClientMsg(msg));
      return true;
    },
    close() {
      ws.close();
    },
  };
}

export function connect(host: string, port: number, events: ConnectionEvents): Connection {
  const ws = new WebSocket(`ws://${host}:${port}`) as unknown as SocketLike;
  return wireUp(ws, events);
}
