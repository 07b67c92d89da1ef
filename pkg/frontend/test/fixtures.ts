import { readdirSync, readFileSync } from "node:fs";
import { join, resolve } from "node:path";

import { validateView, type View } from "../src/schema.js";

// vitest runs with the package directory as cwd
const DIR = resolve(process.cwd(), "test", "fixtures");

export const fixtureNames: string[] = readdirSync(DIR)
  .filter((f) => f.endsWith(".view.json"))
  .sort();

export function loadRaw(name: string): unknown {
  return JSON.parse(readFileSync(join(DIR, name), "utf-8"));
}

export function loadView(name: string): View {
  return validateView(loadRaw(name));
}

/** Deep-copied payload, safe to mangle in negative tests. */
export function mutable(name: string): Record<string, unknown> {
  return JSON.parse(JSON.stringify(loadRaw(name))) as Record<string, unknown>;
}

export const EMPTY = "empty.view.json";
export const FULL = "doc01_discharge_fever.view.json";
