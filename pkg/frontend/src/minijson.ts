// JSON parser that keeps number literals as the exact text from the body.
//
// JSON.parse would turn 2.0 into the JS number 2 and re-stringify it as
// "2", which is not the byte sequence the service sent.  The dashboard
// promises that every figure it shows appears verbatim in the API
// response, so numbers stay strings all the way to the DOM and are only
// Number()ed for chart geometry.

export type VerbatimValue =
  | string
  | boolean
  | null
  | VerbatimValue[]
  | { [key: string]: VerbatimValue };

const NUMBER_HEAD = /^-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?/;
const ESCAPES: Record<string, string> = {
  '"': '"', "\\": "\\", "/": "/", b: "\b", f: "\f",
  n: "\n", r: "\r", t: "\t",
};

export function parseVerbatim(text: string): VerbatimValue {
  let i = 0;

  function fail(msg: string): never {
    throw new SyntaxError(`invalid JSON at offset ${i}: ${msg}`);
  }

  function ws(): void {
    while (i < text.length) {
      const c = text[i];
      if (c === " " || c === "\t" || c === "\n" || c === "\r") i++;
      else break;
    }
  }

  function literal(word: string, value: VerbatimValue): VerbatimValue {
    if (text.startsWith(word, i)) {
      i += word.length;
      return value;
    }
    return fail(`expected ${word}`);
  }

  function str(): string {
    i++; // opening quote
    let out = "";
    for (;;) {
      if (i >= text.length) fail("unterminated string");
      const c = text[i];
      if (c === '"') {
        i++;
        return out;
      }
      if (c === "\\") {
        const e = text[i + 1];
        if (e === "u") {
          const hex = text.slice(i + 2, i + 6);
          if (!/^[0-9a-fA-F]{4}$/.test(hex)) fail("bad unicode escape");
          out += String.fromCharCode(parseInt(hex, 16));
          i += 6;
        } else if (e in ESCAPES) {
          out += ESCAPES[e];
          i += 2;
        } else {
          fail(`bad escape \\${e}`);
        }
      } else {
        out += c;
        i++;
      }
    }
  }

  function num(): string {
    const m = NUMBER_HEAD.exec(text.slice(i));
    if (!m || m[0].length === 0) fail("expected a value");
    i += m[0].length;
    return m[0];
  }

  function arr(): VerbatimValue[] {
    i++; // [
    const out: VerbatimValue[] = [];
    ws();
    if (text[i] === "]") {
      i++;
      return out;
    }
    for (;;) {
      out.push(value());
      ws();
      if (text[i] === ",") {
        i++;
        continue;
      }
      if (text[i] === "]") {
        i++;
        return out;
      }
      fail("expected , or ] in array");
    }
  }

  function obj(): { [key: string]: VerbatimValue } {
    i++; // {
    const out: { [key: string]: VerbatimValue } = {};
    ws();
    if (text[i] === "}") {
      i++;
      return out;
    }
    for (;;) {
      ws();
      if (text[i] !== '"') fail("expected a string key");
      const key = str();
      ws();
      if (text[i] !== ":") fail("expected : after key");
      i++;
      out[key] = value();
      ws();
      if (text[i] === ",") {
        i++;
        continue;
      }
      if (text[i] === "}") {
        i++;
        return out;
      }
      fail("expected , or } in object");
    }
  }

  function value(): VerbatimValue {
    ws();
    if (i >= text.length) fail("unexpected end of input");
    const c = text[i];
    if (c === "{") return obj();
    if (c === "[") return arr();
    if (c === '"') return str();
    if (c === "t") return literal("true", true);
    if (c === "f") return literal("false", false);
    if (c === "n") return literal("null", null);
    return num();
  }

  const out = value();
  ws();
  if (i !== text.length) fail("trailing data");
  return out;
}
