import { readFileSync } from "node:fs";

export function fixtureText(name: string): string {
  return readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf8");
}

export function fixtureJson(name: string): unknown {
  return JSON.parse(fixtureText(name));
}

/** Raw tree-json for a two-level tree: one action, two outcomes. */
export function smallTreeJson(): Record<string, unknown> {
  return {
    format_version: 1,
    root: "0",
    reward_scale: 100,
    nodes: {
      "0": {
        state: [0],
        action: "a1",
        score: 0.6,
        reward: { normalized: 0, raw: 0 },
        reach_probability: 1,
        reach_probability_exact: "1",
        remaining_budget: 1,
        children: {
          "1": { key: "1", probability: 0.4, probability_exact: "2/5" },
          "2": { key: "2", probability: 0.6, probability_exact: "3/5" },
        },
      },
      "1": {
        state: [1],
        action: null,
        score: 0,
        reward: { normalized: 0, raw: 0 },
        reach_probability: 0.4,
        reach_probability_exact: "2/5",
        remaining_budget: 0,
        children: {},
      },
      "2": {
        state: [2],
        action: null,
        score: 1,
        reward: { normalized: 1, raw: 100 },
        reach_probability: 0.6,
        reach_probability_exact: "3/5",
        remaining_budget: 0,
        children: {},
      },
    },
  };
}

/** Raw tree-json for a single terminal node. */
export function leafOnlyTreeJson(): Record<string, unknown> {
  return {
    format_version: 1,
    root: "2",
    reward_scale: 100,
    nodes: {
      "2": {
        state: [2],
        action: null,
        score: 1,
        reward: { normalized: 1, raw: 100 },
        reach_probability: 1,
        reach_probability_exact: "1",
        remaining_budget: 0,
        children: {},
      },
    },
  };
}
