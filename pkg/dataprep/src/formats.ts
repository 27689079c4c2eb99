/**
 * Writers for the toolkit's on-disk dataset layout, plus edge cleanup.
 *
 * A converted dataset is four files in one directory:
 *   edges.txt     one "u v" per line, undirected, deduplicated, 0-based ids
 *   features.atlf binary container: "ATLF1", LE u64 n, LE u64 D, n*D LE f32
 *   labels.txt    one integer per line
 *   masks.txt     one of train/val/test/none per line
 */

import * as crypto from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";

export interface EdgeCleanup {
	edges: Array<[number, number]>; // u < v, sorted, unique
	rawCount: number;
	selfLoops: number;
	duplicates: number;
	unknownEndpoints: number;
}

/** Drop self-loops, merge duplicate/reversed pairs, sort canonically. */
export function cleanEdges(
	raw: Array<[number, number]>,
	n: number,
): EdgeCleanup {
	let selfLoops = 0;
	let unknown = 0;
	const seen = new Set<number>();
	const edges: Array<[number, number]> = [];
	for (const [a, b] of raw) {
		if (a < 0 || b < 0 || a >= n || b >= n) {
			unknown += 1;
			continue;
		}
		if (a === b) {
			selfLoops += 1;
			continue;
		}
		const lo = Math.min(a, b);
		const hi = Math.max(a, b);
		const key = lo * n + hi;
		if (seen.has(key)) continue;
		seen.add(key);
		edges.push([lo, hi]);
	}
	edges.sort((x, y) => (x[0] - y[0]) || (x[1] - y[1]));
	const duplicates = raw.length - selfLoops - unknown - edges.length;
	return { edges, rawCount: raw.length, selfLoops, duplicates, unknownEndpoints: unknown };
}

export function writeEdges(file: string, edges: Array<[number, number]>): void {
	const lines = edges.map(([u, v]) => `${u} ${v}`);
	fs.writeFileSync(file, lines.join("\n") + "\n");
}

/** Binary feature container understood by the primary loader. */
export function writeAtlf(file: string, rows: number, cols: number, data: Float32Array): void {
	if (data.length !== rows * cols) {
		throw new Error(`feature buffer has ${data.length} values, expected ${rows * cols}`);
	}
	const header = Buffer.alloc(5 + 16);
	header.write("ATLF1", 0, "ascii");
	header.writeBigUInt64LE(BigInt(rows), 5);
	header.writeBigUInt64LE(BigInt(cols), 13);
	const payload = Buffer.from(data.buffer, data.byteOffset, data.byteLength);
	fs.writeFileSync(file, Buffer.concat([header, payload]));
}

export function writeLabels(file: string, labels: Int32Array | number[]): void {
	fs.writeFileSync(file, Array.from(labels).join("\n") + "\n");
}

export type MaskName = "train" | "val" | "test" | "none";

export function writeMasks(file: string, masks: MaskName[]): void {
	fs.writeFileSync(file, masks.join("\n") + "\n");
}

/** Deterministic PRNG (mulberry32) so recorded split seeds reproduce exactly. */
export function mulberry32(seed: number): () => number {
	let a = seed >>> 0;
	return () => {
		a = (a + 0x6d2b79f5) >>> 0;
		let t = a;
		t = Math.imul(t ^ (t >>> 15), t | 1);
		t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
		return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
	};
}

/** Seeded random split at the given ratios (train, val; rest is test). */
export function randomSplit(
	n: number,
	trainFrac: number,
	valFrac: number,
	seed: number,
): MaskName[] {
	const order = Array.from({ length: n }, (_, i) => i);
	const rand = mulberry32(seed);
	for (let i = n - 1; i > 0; i--) {
		const j = Math.floor(rand() * (i + 1));
		[order[i], order[j]] = [order[j], order[i]];
	}
	const masks: MaskName[] = new Array(n).fill("none");
	const nTrain = Math.floor(trainFrac * n);
	const nVal = Math.floor(valFrac * n);
	for (let k = 0; k < n; k++) {
		masks[order[k]] = k < nTrain ? "train" : k < nTrain + nVal ? "val" : "test";
	}
	return masks;
}

export function sha256(buf: Buffer | string): string {
	return crypto.createHash("sha256").update(buf).digest("hex");
}

export function sha256File(file: string): string {
	return sha256(fs.readFileSync(file));
}

export interface ConversionManifest {
	dataset: string;
	source: { url: string; archive?: string; archiveSha256?: string };
	files: Record<string, { path: string; sha256: string }>;
	counts: { n: number; m_raw: number; m_dedup: number; D: number; C: number };
	cleanup: { selfLoops: number; duplicates: number; unknownEndpoints: number };
	split: { convention: string; seed?: number; index?: number };
	classMap?: Record<string, number>;
}

export function writeManifest(outDir: string, manifest: ConversionManifest): string {
	const file = path.join(outDir, "manifest.json");
	fs.writeFileSync(file, JSON.stringify(manifest, null, 2) + "\n");
	return file;
}

export function fileEntry(outDir: string, name: string) {
	const p = path.join(outDir, name);
	return { path: name, sha256: sha256File(p) };
}
