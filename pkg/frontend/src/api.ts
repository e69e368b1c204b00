/** Typed fetch client for the kgtrace tree-explorer HTTP API.
 *
 * The client is stateless: tree identity lives in the server session store
 * and is threaded through as the `tree_id` field of every tree payload.
 */

export interface TreeNodeDoc {
  id: number;
  name: string;
  label: number | null;
}

export interface TreeEdgeDoc {
  parent_pos: number;
  child_pos: number;
  child_id: number;
  weight: number;
}

export interface TreeDoc {
  tree_id: string;
  root: number;
  l: number;
  m: number;
  /** index == tree position; position 0 is the root */
  nodes: TreeNodeDoc[];
  edges: TreeEdgeDoc[];
  /** positions on the greedy max-weight trace path, root excluded */
  trace: number[];
}

/** Server rejected the request (4xx); `status` distinguishes 404/409/400. */
export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

/** Transport-level failure; the UI surfaces these as a retryable banner. */
export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`network failure: ${String(cause)}`);
    this.name = "NetworkError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new NetworkError(err);
  }
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  /** Ranked node names: prefix matches first, then substring matches.
   *  An empty query resolves to an empty list without touching the network. */
  async searchNodes(query: string): Promise<string[]> {
    if (query === "") return [];
    const doc = await request<{ names: string[] }>(
      `${this.baseUrl}/api/nodes?q=${encodeURIComponent(query)}`,
    );
    return doc.names;
  }

  async getTree(node: string, levels = 2, degree = 3): Promise<TreeDoc> {
    const params = new URLSearchParams({
      node,
      levels: String(levels),
      degree: String(degree),
    });
    return request<TreeDoc>(`${this.baseUrl}/api/tree?${params}`);
  }

  async expand(treeId: string, position: number, degree = 3): Promise<TreeDoc> {
    return request<TreeDoc>(`${this.baseUrl}/api/tree/expand`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ tree_id: treeId, position, degree }),
    });
  }
}
