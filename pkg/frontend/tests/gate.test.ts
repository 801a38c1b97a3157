// Capability gating: a registered model cannot be interpreted, so the
// Interpret panel must disable its controls and say why.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { parseVerbatim } from "../src/minijson.js";
import { renderComparePanel } from "../src/panels/compare.js";
import { renderExplainPanel } from "../src/panels/explain.js";
import { interpretGate, renderInterpretPanel } from "../src/panels/interpret.js";
import type { ModelDoc } from "../src/types.js";

const models = parseVerbatim(
  readFileSync(join(__dirname, "fixtures", "models.json"), "utf8"),
) as unknown as ModelDoc[];
const UI = { busy: false };

describe("interpret panel gating", () => {
  it("the registered model is present and not interpretable", () => {
    const ext = models.find((m) => m.name === "ext");
    expect(ext).toBeDefined();
    expect(ext!.family).toBe("score_table");
    expect(ext!.interpretable).toBe(false);
  });

  it("disables every control for the registered model and explains why", () => {
    const html = renderInterpretPanel(models, "ext", false, undefined, null, UI);
    expect(html).toContain('<button type="submit" disabled>interpret</button>');
    expect(html).toMatch(/name="local"[^>]* disabled/);
    expect(html).toMatch(/name="row"[^>]* disabled/);
    expect(html).toContain('class="gate"');
    expect(html).toContain("not inherently interpretable");
    expect(html).toContain("score_table");
  });

  it("keeps controls live for a glass model", () => {
    const html = renderInterpretPanel(models, "glm", false, undefined, null, UI);
    expect(html).toContain('<button type="submit">interpret</button>');
    expect(html).not.toContain('class="gate"');
  });

  it("gate text comes from the model description", () => {
    const ext = models.find((m) => m.name === "ext")!;
    expect(interpretGate(ext)).toContain("ext");
    const glm = models.find((m) => m.name === "glm")!;
    expect(interpretGate(glm)).toBeNull();
  });
});

describe("evaluability gating elsewhere", () => {
  it("compare panel refuses the score table model", () => {
    const html = renderComparePanel(models, [], [], null, UI);
    expect(html).toMatch(/value="ext" disabled title="[^"]*cannot join a comparison"/);
    expect(html).toMatch(/value="glm"(?! disabled)/);
  });

  it("explain panel disables the score table model in its picker", () => {
    const html = renderExplainPanel(models, "glm", "pfi", null, UI);
    expect(html).toMatch(/<option value="ext" disabled title="[^"]*cannot score fresh rows[^"]*">/);
  });
});
