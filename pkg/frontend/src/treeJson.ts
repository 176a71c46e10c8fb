/**
 * Types and validation for tree-json, the exchange format produced by the
 * solver (`treesolve solve --out tree.json` or the /v1 endpoints).
 *
 * A document is a map from state keys (comma-separated integer tuples) to
 * nodes. Interior nodes carry the prescribed action and one outgoing edge
 * per outcome; leaves carry the achieved reward.
 */

export interface OutcomeEdge {
  /** State key of the child node. */
  readonly key: string;
  readonly probability: number;
  /** Exact probability as a decimal or fraction string, e.g. "0.6" or "3/10". */
  readonly probabilityExact: string;
}

export interface TreeNode {
  readonly state: readonly number[];
  /** Prescribed action id, or null on leaves. */
  readonly action: string | null;
  /** Maximum achievable expected reward from this state, normalized to [0, 1]. */
  readonly score: number;
  readonly reward: { readonly normalized: number; readonly raw: number };
  /** Probability of reaching this node from the root of the tree. */
  readonly reachProbability: number;
  readonly reachProbabilityExact: string;
  readonly remainingBudget: number;
  /** Outgoing edges keyed by outcome id; empty on leaves. */
  readonly children: ReadonlyMap<number, OutcomeEdge>;
}

export interface TreeDocument {
  readonly formatVersion: number;
  readonly root: string;
  /** Raw reward = normalized reward times this scale. */
  readonly rewardScale: number;
  readonly nodes: ReadonlyMap<string, TreeNode>;
}

export const TREE_FORMAT_VERSION = 1;

/** Raised when a document does not conform to the tree-json format. */
export class TreeFormatError extends Error {}

function fail(path: string, message: string): never {
  throw new TreeFormatError(`${path}: ${message}`);
}

function asObject(value: unknown, path: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    fail(path, "expected an object");
  }
  return value as Record<string, unknown>;
}

function asFiniteNumber(value: unknown, path: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    fail(path, "expected a finite number");
  }
  return value;
}

function asString(value: unknown, path: string): string {
  if (typeof value !== "string") fail(path, "expected a string");
  return value;
}

function asStateVector(value: unknown, path: string): number[] {
  if (!Array.isArray(value) || value.length === 0) {
    fail(path, "expected a non-empty array");
  }
  return value.map((entry, i) => {
    if (typeof entry !== "number" || !Number.isInteger(entry) || entry < 0) {
      fail(`${path}[${i}]`, "expected a non-negative integer");
    }
    return entry;
  });
}

function parseEdge(value: unknown, path: string): OutcomeEdge {
  const obj = asObject(value, path);
  const probability = asFiniteNumber(obj.probability, `${path}.probability`);
  if (probability <= 0 || probability > 1) {
    fail(`${path}.probability`, "expected a probability in (0, 1]");
  }
  return {
    key: asString(obj.key, `${path}.key`),
    probability,
    probabilityExact: asString(obj.probability_exact, `${path}.probability_exact`),
  };
}

function parseNode(value: unknown, path: string): TreeNode {
  const obj = asObject(value, path);
  const action = obj.action === null ? null : asString(obj.action, `${path}.action`);
  const rewardObj = asObject(obj.reward, `${path}.reward`);
  const children = new Map<number, OutcomeEdge>();
  for (const [outcome, edge] of Object.entries(asObject(obj.children, `${path}.children`))) {
    if (!/^[0-9]+$/.test(outcome)) {
      fail(`${path}.children`, `outcome id ${JSON.stringify(outcome)} is not a non-negative integer`);
    }
    children.set(Number(outcome), parseEdge(edge, `${path}.children[${outcome}]`));
  }
  if (action === null && children.size > 0) fail(path, "leaf node has children");
  if (action !== null && children.size === 0) fail(path, "interior node has no children");
  const reach = asFiniteNumber(obj.reach_probability, `${path}.reach_probability`);
  if (reach < 0 || reach > 1) fail(`${path}.reach_probability`, "expected a probability in [0, 1]");
  return {
    state: asStateVector(obj.state, `${path}.state`),
    action,
    score: asFiniteNumber(obj.score, `${path}.score`),
    reward: {
      normalized: asFiniteNumber(rewardObj.normalized, `${path}.reward.normalized`),
      raw: asFiniteNumber(rewardObj.raw, `${path}.reward.raw`),
    },
    reachProbability: reach,
    reachProbabilityExact: asString(obj.reach_probability_exact, `${path}.reach_probability_exact`),
    remainingBudget: asFiniteNumber(obj.remaining_budget, `${path}.remaining_budget`),
    children,
  };
}

/** Validate a decoded JSON value and return a typed document. */
export function treeDocumentFromJson(data: unknown): TreeDocument {
  const doc = asObject(data, "document");
  const formatVersion = asFiniteNumber(doc.format_version, "format_version");
  if (formatVersion !== TREE_FORMAT_VERSION) {
    fail("format_version", `unsupported version ${formatVersion}, expected ${TREE_FORMAT_VERSION}`);
  }
  const root = asString(doc.root, "root");
  const rewardScale = asFiniteNumber(doc.reward_scale, "reward_scale");
  if (rewardScale <= 0) fail("reward_scale", "expected a positive number");
  const nodesObj = asObject(doc.nodes, "nodes");
  const nodes = new Map<string, TreeNode>();
  for (const [key, value] of Object.entries(nodesObj)) {
    nodes.set(key, parseNode(value, `nodes[${JSON.stringify(key)}]`));
  }
  if (!nodes.has(root)) fail("root", `key ${JSON.stringify(root)} is not in nodes`);
  for (const [key, node] of nodes) {
    for (const [outcome, edge] of node.children) {
      if (!nodes.has(edge.key)) {
        fail(
          `nodes[${JSON.stringify(key)}].children[${outcome}].key`,
          `unknown node ${JSON.stringify(edge.key)}`,
        );
      }
    }
  }
  return { formatVersion, root, rewardScale, nodes };
}

/** Parse tree-json text. Throws TreeFormatError on malformed input. */
export function parseTreeDocument(text: string): TreeDocument {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    fail("document", `invalid JSON (${err instanceof Error ? err.message : String(err)})`);
  }
  return treeDocumentFromJson(data);
}

/** Look up a node that is known to exist, e.g. a validated edge target. */
export function nodeAt(tree: TreeDocument, key: string): TreeNode {
  const node = tree.nodes.get(key);
  if (node === undefined) {
    throw new TreeFormatError(`nodes[${JSON.stringify(key)}]: no such node`);
  }
  return node;
}
