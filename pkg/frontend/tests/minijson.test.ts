import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { parseVerbatim } from "../src/minijson.js";

const FIXTURES = join(__dirname, "fixtures");

describe("parseVerbatim", () => {
  it("keeps number literals as their source text", () => {
    const v = parseVerbatim('{"a": 2.0, "b": 1e-07, "c": -0.5, "d": 10}') as Record<string, unknown>;
    expect(v.a).toBe("2.0");
    expect(v.b).toBe("1e-07");
    expect(v.c).toBe("-0.5");
    expect(v.d).toBe("10");
  });

  it("handles nesting, strings, escapes and literals", () => {
    const v = parseVerbatim('{"s": "a\\nb \\u0041", "arr": [true, false, null, {"k": 3.25}]}') as any;
    expect(v.s).toBe("a\nb A");
    expect(v.arr[0]).toBe(true);
    expect(v.arr[1]).toBe(false);
    expect(v.arr[2]).toBe(null);
    expect(v.arr[3].k).toBe("3.25");
  });

  it("agrees with JSON.parse on structure", () => {
    const text = readFileSync(join(FIXTURES, "weakspot.json"), "utf8");
    const mine = parseVerbatim(text) as any;
    const std = JSON.parse(text);
    expect(Object.keys(mine).sort()).toEqual(Object.keys(std).sort());
    expect(mine.result.slices.length).toBe(std.result.slices.length);
    // and the raw literal round-trips to the same float
    expect(Number(mine.result.overall)).toBe(std.result.overall);
  });

  it("preserves exponent spellings python emits", () => {
    const text = readFileSync(join(FIXTURES, "interpret.json"), "utf8");
    const flat = JSON.stringify(parseVerbatim(text));
    expect(text).toContain("e-");
    // every exponent literal in the source survives somewhere in the parse
    for (const m of text.match(/-?\d+(?:\.\d+)?e-?\d+/g) ?? []) {
      expect(flat).toContain(m);
    }
  });

  it("rejects trailing garbage and bad syntax", () => {
    expect(() => parseVerbatim("{} x")).toThrow(SyntaxError);
    expect(() => parseVerbatim("{bad}")).toThrow(SyntaxError);
    expect(() => parseVerbatim('{"a": 01}')).toThrow(SyntaxError);
    expect(() => parseVerbatim("")).toThrow(SyntaxError);
  });
});
