/** Shared test fixtures: small server payloads in the exact tree-JSON shape
 * the HTTP API returns. */

import type { TreeDoc } from "./api.js";

/** Two-level, degree-3 tree below an abnormal success-rate indicator. The
 * greedy path runs through the strongest level-1 correlate down to the
 * message-flag field. */
export function goldenTree(): TreeDoc {
  const names = [
    "regis success rate", // 0 root
    "registration success cnt", // 1
    "regis fail cnt", // 2
    "auth type", // 3
    "msgflag", // 4 (under 1)
    "data field 007", // 5
    "data field 012", // 6
    "request cause group", // 7 (under 2)
    "data field 019", // 8
    "data field 023", // 9
    "procedure status", // 10 (under 3)
    "data field 031", // 11
    "data field 042", // 12
  ];
  return {
    tree_id: "golden01",
    root: 40,
    l: 2,
    m: 3,
    nodes: names.map((name, i) => ({ id: 40 + i, name, label: null })),
    edges: [
      { parent_pos: 0, child_pos: 1, child_id: 41, weight: 0.575 },
      { parent_pos: 0, child_pos: 2, child_id: 42, weight: 0.57 },
      { parent_pos: 0, child_pos: 3, child_id: 43, weight: 0.563 },
      { parent_pos: 1, child_pos: 4, child_id: 44, weight: 0.581 },
      { parent_pos: 1, child_pos: 5, child_id: 45, weight: 0.1 },
      { parent_pos: 1, child_pos: 6, child_id: 46, weight: 0.1 },
      { parent_pos: 2, child_pos: 7, child_id: 47, weight: 0.12 },
      { parent_pos: 2, child_pos: 8, child_id: 48, weight: 0.1 },
      { parent_pos: 2, child_pos: 9, child_id: 49, weight: 0.1 },
      { parent_pos: 3, child_pos: 10, child_id: 50, weight: 0.11 },
      { parent_pos: 3, child_pos: 11, child_id: 51, weight: 0.1 },
      { parent_pos: 3, child_pos: 12, child_id: 52, weight: 0.1 },
    ],
    trace: [1, 4],
  };
}

/** The golden tree after expanding the greedy leaf (position 4) with
 * degree 3: three appended children and a one-node-longer trace. */
export function goldenTreeExpanded(): TreeDoc {
  const doc = goldenTree();
  const extra = ["procedure status", "data field 051", "data field 055"];
  return {
    ...doc,
    nodes: [
      ...doc.nodes,
      ...extra.map((name, i) => ({ id: 60 + i, name, label: null })),
    ],
    edges: [
      ...doc.edges,
      { parent_pos: 4, child_pos: 13, child_id: 60, weight: 0.44 },
      { parent_pos: 4, child_pos: 14, child_id: 61, weight: 0.2 },
      { parent_pos: 4, child_pos: 15, child_id: 62, weight: 0.2 },
    ],
    trace: [1, 4, 13],
  };
}

export function singleNodeTree(): TreeDoc {
  return {
    tree_id: "solo",
    root: 7,
    l: 0,
    m: 3,
    nodes: [{ id: 7, name: "lonely indicator", label: 2 }],
    edges: [],
    trace: [],
  };
}
