/**
 * Deterministic DAG layout.
 *
 * Nodes go into columns by longest path from a root, ordered
 * alphabetically within a column, with a small seeded vertical jitter so
 * parallel edges do not overlap. The seed derives from the node set, so
 * the same graph always renders in the same place and screenshots are
 * reproducible.
 */

export interface NodePos {
  x: number;
  y: number;
}

export interface LayoutEdge {
  source: string;
  target: string;
}

/** Small fast seeded PRNG (mulberry32). */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function hashString(s: string): number {
  // FNV-1a, good enough to spread node-set names into a seed
  let h = 0x811c9dc5;
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

/** Longest-path layer per node; sources sit in layer 0. Nodes on a cycle
 * (which a served graph never has) fall back to the last layer so the
 * layout still terminates. */
export function layerAssignment(nodes: string[], edges: LayoutEdge[]): Map<string, number> {
  const incoming = new Map<string, number>(nodes.map((n) => [n, 0]));
  const out = new Map<string, string[]>(nodes.map((n) => [n, []]));
  for (const e of edges) {
    if (!incoming.has(e.source) || !incoming.has(e.target)) continue;
    incoming.set(e.target, (incoming.get(e.target) ?? 0) + 1);
    out.get(e.source)!.push(e.target);
  }
  const layer = new Map<string, number>(nodes.map((n) => [n, 0]));
  const queue = nodes.filter((n) => incoming.get(n) === 0).sort();
  let processed = 0;
  while (queue.length > 0) {
    const n = queue.shift()!;
    processed++;
    for (const m of out.get(n)!) {
      layer.set(m, Math.max(layer.get(m)!, layer.get(n)! + 1));
      incoming.set(m, incoming.get(m)! - 1);
      if (incoming.get(m) === 0) queue.push(m);
    }
  }
  if (processed < nodes.length) {
    const deepest = Math.max(0, ...layer.values());
    for (const n of nodes) {
      if ((incoming.get(n) ?? 0) > 0) layer.set(n, deepest + 1);
    }
  }
  return layer;
}

export function layeredLayout(
  nodes: string[],
  edges: LayoutEdge[],
  width = 900,
  height = 560,
): Record<string, NodePos> {
  const layer = layerAssignment(nodes, edges);
  const columns = new Map<number, string[]>();
  for (const n of nodes) {
    const l = layer.get(n)!;
    if (!columns.has(l)) columns.set(l, []);
    columns.get(l)!.push(n);
  }
  const nColumns = columns.size;
  const rand = mulberry32(hashString([...nodes].sort().join("|")));
  const margin = 70;
  const positions: Record<string, NodePos> = {};
  const layers = [...columns.keys()].sort((a, b) => a - b);
  layers.forEach((l, ci) => {
    const column = columns.get(l)!.sort();
    const x = nColumns === 1 ? width / 2 : margin + (ci * (width - 2 * margin)) / (nColumns - 1);
    column.forEach((n, ri) => {
      const y =
        column.length === 1
          ? height / 2
          : margin + (ri * (height - 2 * margin)) / (column.length - 1);
      // jitter keeps long chains from producing perfectly collinear edges
      positions[n] = { x, y: y + (rand() - 0.5) * 24 };
    });
  });
  return positions;
}
