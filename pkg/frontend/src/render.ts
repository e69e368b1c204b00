/** Plain-DOM tree rendering: root at the left, levels nested rightward as
 * lists; each edge labeled with its weight; greedy-path nodes highlighted. */

import { formatWeight, TreeViewModel } from "./model.js";

export interface RenderHandlers {
  onExpand?: (position: number) => void;
  onToggle?: (position: number) => void;
}

export function renderTree(
  vm: TreeViewModel,
  handlers: RenderHandlers = {},
): HTMLElement {
  const container = document.createElement("div");
  container.className = "tree";
  container.appendChild(renderPosition(vm, 0, null, handlers));
  return container;
}

function renderPosition(
  vm: TreeViewModel,
  position: number,
  weight: number | null,
  handlers: RenderHandlers,
): HTMLElement {
  const item = document.createElement("div");
  item.className = "tree-node";
  item.dataset.pos = String(position);
  if (vm.onTrace(position)) item.classList.add("trace");

  const label = document.createElement("span");
  label.className = "node-label";
  label.textContent = vm.nameAt(position);
  item.appendChild(label);

  if (weight !== null) {
    const badge = document.createElement("span");
    badge.className = "edge-weight";
    badge.textContent = formatWeight(weight);
    item.appendChild(badge);
  }

  if (vm.isLeaf(position)) {
    const button = document.createElement("button");
    button.className = "expand-button";
    button.textContent = "expand";
    button.addEventListener("click", () => handlers.onExpand?.(position));
    item.appendChild(button);
  } else {
    const toggle = document.createElement("button");
    toggle.className = "collapse-toggle";
    toggle.textContent = vm.collapsed.has(position) ? "+" : "−";
    toggle.addEventListener("click", () => handlers.onToggle?.(position));
    item.appendChild(toggle);

    if (!vm.collapsed.has(position)) {
      const children = document.createElement("div");
      children.className = "children";
      for (const edge of vm.childrenOf(position)) {
        children.appendChild(
          renderPosition(vm, edge.child_pos, edge.weight, handlers),
        );
      }
      item.appendChild(children);
    }
  }
  return item;
}
