import { readFileSync } from "node:fs";

/** Load a recorded API fixture (captured verbatim from a live engine). */
export function loadFixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as T;
}
