/** View model over the server tree JSON: adjacency lookups, leaf tests, and
 * per-position collapse state. Every weight comes verbatim from the server;
 * the client never computes correlations. */

import type { TreeDoc, TreeEdgeDoc } from "./api.js";

export class TreeViewModel {
  private readonly childEdges: Map<number, TreeEdgeDoc[]>;
  private readonly traceSet: Set<number>;
  readonly collapsed: Set<number>;

  constructor(
    readonly doc: TreeDoc,
    collapsed?: Set<number>,
  ) {
    this.childEdges = new Map();
    for (const edge of doc.edges) {
      const bucket = this.childEdges.get(edge.parent_pos);
      if (bucket) bucket.push(edge);
      else this.childEdges.set(edge.parent_pos, [edge]);
    }
    this.traceSet = new Set(doc.trace);
    this.collapsed = collapsed ?? new Set();
  }

  /** Child edges in server order (strongest correlate first). */
  childrenOf(position: number): TreeEdgeDoc[] {
    return this.childEdges.get(position) ?? [];
  }

  isLeaf(position: number): boolean {
    return this.childrenOf(position).length === 0;
  }

  onTrace(position: number): boolean {
    return this.traceSet.has(position);
  }

  nameAt(position: number): string {
    return this.doc.nodes[position].name;
  }

  /** Deepest position on the greedy path (the leaf an operator would
   *  expand to continue the trace), or 0 for a single-node tree. */
  greedyFrontier(): number {
    return this.doc.trace.length > 0
      ? this.doc.trace[this.doc.trace.length - 1]
      : 0;
  }

  /** New view model for an updated server doc, carrying over collapse state
   *  (positions are stable: expansion only appends). */
  withDoc(doc: TreeDoc): TreeViewModel {
    return new TreeViewModel(doc, new Set(this.collapsed));
  }

  toggleCollapsed(position: number): void {
    if (this.collapsed.has(position)) this.collapsed.delete(position);
    else this.collapsed.add(position);
  }
}

/** Display formatting used everywhere a weight appears: exactly 3 decimals
 *  of the untouched server value. */
export function formatWeight(weight: number): string {
  return weight.toFixed(3);
}
