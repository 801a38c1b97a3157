import { describe, expect, it } from "vitest";
import { AppState, encodeState, parseState } from "../src/state.js";

describe("url state", () => {
  const cases: AppState[] = [
    { panel: "data" },
    { panel: "train" },
    { panel: "diagnose", tab: "weakspot", model: "xgb2" },
    { panel: "interpret", model: "glm", local: true, row: "3" },
    { panel: "explain", model: "xgb2", method: "ale" },
    { panel: "compare", models: ["glm", "xgb2"], tests: ["robustness", "reliability"] },
  ];

  it("round-trips through the hash", () => {
    for (const s of cases) {
      expect(parseState(encodeState(s))).toEqual(s);
    }
  });

  it("falls back to the data panel on junk", () => {
    expect(parseState("").panel).toBe("data");
    expect(parseState("#/nonsense").panel).toBe("data");
    expect(parseState("#/diagnose?tab=weakspot").tab).toBe("weakspot");
  });
});
