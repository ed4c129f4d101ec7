/** Full re-render of a display frame into DOM controls, keyed by node id.
 * The server tree is the single source of truth; the only local state is
 * text edits in progress, which are reapplied after every re-render. */

import { ClientMsg, DisplayNode, collectIds } from "./protocol.js";

export type Send = (msg: ClientMsg) => boolean;

export class RenderModel {
  frame: DisplayNode | null = null;
  connected = false;
  /** addscreen field edits in progress: node id -> field -> text */
  edits = new Map<number, Map<string, string>>();

  editsFor(id: number): Map<string, string> {
    let m = this.edits.get(id);
    if (!m) {
      m = new Map();
      this.edits.set(id, m);
    }
    return m;
  }
}

function el(doc: Document, tag: string, className: string): HTMLElement {
  const e = doc.createElement(tag);
  e.className = className;
  return e;
}

function renderNode(
  doc: Document,
  node: DisplayNode,
  model: RenderModel,
  send: Send
): HTMLElement {
  let out: HTMLElement;
  switch (node.kind) {
    case "button": {
      const b = el(doc, "button", "wc-button") as HTMLButtonElement;
      b.textContent = String(node.props.label ?? "");
      b.addEventListener("click", () => {
        send({ type: "event", target: node.id, name: "push", args: [node.id] });
      });
      out = b;
      break;
    }
    case "label": {
      out = el(doc, "span", "wc-label");
      out.textContent = String(node.props.text ?? "");
      break;
    }
    case "clock": {
      out = el(doc, "span", "wc-clock");
      out.textContent = new Date().toLocaleTimeString();
      break;
    }
    case "phone":
    case "window":
    case "screen": {
      const frame = el(doc, "div", `wc-${node.kind}`);
      const title = String(node.props.title ?? "");
      if (title) {
        const bar = el(doc, "div", "wc-titlebar");
        bar.textContent = title;
        frame.appendChild(bar);
      }
      const body = el(doc, "div", "wc-body");
      const row = el(doc, "div", "wc-buttonrow");
      for (const child of node.children) {
        const rendered = renderNode(doc, child, model, send);
        (child.kind === "button" ? row : body).appendChild(rendered);
      }
      frame.appendChild(body);
      if (row.childNodes.length) frame.appendChild(row);
      out = frame;
      break;
    }
    case "addscreen": {
      const form = el(doc, "div", "wc-addscreen");
      const list = el(doc, "ul", "wc-records");
      const records = Array.isArray(node.props.records) ? node.props.records : [];
      for (const r of records as Array<Record<string, string>>) {
        const li = doc.createElement("li");
        li.textContent = `${r.key}: ${r.val}`;
        list.appendChild(li);
      }
      form.appendChild(list);
      for (const field of ["name", "address"]) {
        const input = el(doc, "input", `wc-field wc-field-${field}`) as HTMLInputElement;
        input.placeholder = field;
        input.value = model.editsFor(node.id).get(field) ?? "";
        input.addEventListener("input", () => {
          model.editsFor(node.id).set(field, input.value);
          send({ type: "set-field", target: node.id, field, text: input.value });
        });
        form.appendChild(input);
      }
      out = form;
      break;
    }
    default: {
      out = el(doc, "div", "wc-unknown");
      out.textContent = node.kind;
      break;
    }
  }
  out.dataset.nodeId = String(node.id);
  out.dataset.kind = node.kind;
  return out;
}

/** Replace the mount's content with the frame; returns the rendered ids. */
export function render(
  mount: HTMLElement,
  frame: DisplayNode | null,
  model: RenderModel,
  send: Send
): Set<number> {
  const doc = mount.ownerDocument;
  model.frame = frame;
  mount.replaceChildren();
  if (!model.connected) {
    const banner = el(doc, "div", "wc-banner");
    banner.textContent = "disconnected - trying to reconnect";
    mount.appendChild(banner);
  }
  if (frame !== null) {
    mount.appendChild(renderNode(doc, frame, model, send));
  }
  return renderedIds(mount);
}

export function renderedIds(mount: HTMLElement): Set<number> {
  const out = new Set<number>();
  mount.querySelectorAll<HTMLElement>("[data-node-id]").forEach((e) => {
    out.add(Number(e.dataset.nodeId));
  });
  return out;
}

/** The frame-fidelity invariant: rendered ids match the frame's ids. */
export function faithful(mount: HTMLElement, frame: DisplayNode | null): boolean {
  const want = collectIds(frame);
  const got = renderedIds(mount);
  if (want.size !== got.size) return false;
  for (const id of want) if (!got.has(id)) return false;
  return true;
}
