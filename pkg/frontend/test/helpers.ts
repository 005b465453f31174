import * as fs from "node:fs";
import * as path from "node:path";

/** Locate a fixture whether tests run from test/ or from dist/test/. */
export function fixturePath(name: string): string {
  const candidates = [
    path.join(__dirname, "fixtures", name),
    path.join(__dirname, "..", "..", "test", "fixtures", name),
  ];
  for (const candidate of candidates) {
    if (fs.existsSync(candidate)) {
      return candidate;
    }
  }
  throw new Error(`fixture ${name} not found near ${__dirname}`);
}
