/**
 * Walk state over a loaded decision tree.
 *
 * A WalkSession is immutable: recording an outcome returns a new session
 * whose parent is the old one, so undo restores the exact previous object
 * and replaying the breadcrumb from the root reproduces the cursor.
 */

import {
  OutcomeEdge,
  TreeDocument,
  TreeNode,
  nodeAt,
  parseTreeDocument,
} from "./treeJson.js";

/** Raised on walk operations that do not apply at the current cursor. */
export class WalkError extends Error {}

/** One traversed edge: the action taken and the outcome observed. */
export interface BreadcrumbStep {
  readonly action: string;
  readonly outcomeId: number;
  readonly probability: number;
}

export class WalkSession {
  private constructor(
    readonly tree: TreeDocument,
    /** State key of the current node. */
    readonly cursor: string,
    readonly breadcrumb: readonly BreadcrumbStep[],
    /** Product of the outcome probabilities along the breadcrumb. */
    readonly pathProbability: number,
    private readonly parent: WalkSession | null,
  ) {}

  /** Fresh session at the tree's root with path probability 1. */
  static atRoot(tree: TreeDocument): WalkSession {
    return new WalkSession(tree, tree.root, [], 1, null);
  }

  get node(): TreeNode {
    return nodeAt(this.tree, this.cursor);
  }

  /** Action prescribed at the cursor, or null on a terminal node. */
  get prescription(): string | null {
    return this.node.action;
  }

  get isTerminal(): boolean {
    return this.node.action === null;
  }

  get remainingBudget(): number {
    return this.node.remainingBudget;
  }

  /** Expected reward achievable from the cursor (normalized). */
  get scoreToGo(): number {
    return this.node.score;
  }

  /** Reward achieved at the cursor; nonzero only on reward states. */
  get reward(): { normalized: number; raw: number } {
    return this.node.reward;
  }

  /** Outcome ids recordable at the cursor, ascending. */
  outcomeIds(): number[] {
    return [...this.node.children.keys()].sort((a, b) => a - b);
  }

  outcomeEdge(outcomeId: number): OutcomeEdge | undefined {
    return this.node.children.get(outcomeId);
  }

  /**
   * Advance the cursor along the given outcome edge.
   *
   * Rejects outcomes that are not edges of the current node; the session
   * is unchanged in that case.
   */
  recordOutcome(outcomeId: number): WalkSession {
    const node = this.node;
    if (node.action === null) {
      throw new WalkError(`node ${this.cursor} is terminal, no outcomes to record`);
    }
    const edge = node.children.get(outcomeId);
    if (edge === undefined) {
      throw new WalkError(`outcome ${outcomeId} is not an edge of node ${this.cursor}`);
    }
    const step: BreadcrumbStep = {
      action: node.action,
      outcomeId,
      probability: edge.probability,
    };
    return new WalkSession(
      this.tree,
      edge.key,
      [...this.breadcrumb, step],
      this.pathProbability * edge.probability,
      this,
    );
  }

  canUndo(): boolean {
    return this.parent !== null;
  }

  /** Return the session as it was before the last recorded outcome. */
  undo(): WalkSession {
    if (this.parent === null) {
      throw new WalkError("already at the root, nothing to undo");
    }
    return this.parent;
  }
}

/**
 * Parse tree-json text and open a session at its root.
 *
 * Throws TreeFormatError on malformed input, in which case no session
 * exists.
 */
export function loadTree(text: string): WalkSession {
  return WalkSession.atRoot(parseTreeDocument(text));
}
