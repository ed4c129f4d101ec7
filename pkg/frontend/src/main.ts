/** Page entry point: connect to the server from ?host=...&port=... and keep
 * the mount in sync with incoming frames, reconnecting on drops. */

import { RenderModel } from "./render.js";
import { render } from "./render.js";
import { connect, Connection } from "./transport.js";

const RECONNECT_MS = 1000;

export function start(doc: Document): void {
  const params = new URLSearchParams(doc.location?.search ?? "");
  const host = params.get("host") ?? "127.0.0.1";
  const port = Number(params.get("port") ?? "8140");
  const mount = doc.getElementById("app");
  if (!mount) throw new Error("missing #app mount point");

  const model = new RenderModel();
  let conn: Connection | null = null;

  const redraw = () =>
    render(mount, model.frame, model, (msg) => (conn ? conn.send(msg) : false));

  const open = () => {
    conn = connect(host, port, {
      onOpen() {
        model.connected = true;
        redraw();
      },
      onMessage(msg) {
        if (msg.type === "display") {
          model.frame = msg.root;
          redraw();
        } else {
          console.warn("server error:", msg.message);
        }
      },
      onClose() {
        model.connected = false;
        conn = null;
        redraw();
        setTimeout(open, RECONNECT_MS);
      },
    });
  };

  redraw();
  open();
}

declare const window: { document: Document } | undefined;
if (typeof window !== "undefined" && window) {
  start(window.document);
}
