/**
 * Dataset registry and the conversion driver: unpack (or download) the
 * upstream distribution, normalize it, emit the four-file dataset layout,
 * and record a manifest whose counts match the emitted files exactly.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { parseContentCites, parsePubmedTabs, type ParsedDataset } from "./citation.js";
import {
	cleanEdges,
	ConversionManifest,
	fileEntry,
	MaskName,
	randomSplit,
	sha256,
	writeAtlf,
	writeEdges,
	writeLabels,
	writeManifest,
	writeMasks,
} from "./formats.js";
import { readNpz } from "./npz.js";
import { findEntry, untar } from "./tar.js";

export interface DatasetSpec {
	url: string;
	kind: "content-cites" | "pubmed-tabs" | "npz";
	/** archive entry suffixes, where applicable */
	entries?: string[];
	splitConvention: string;
}

export const DATASETS: Record<string, DatasetSpec> = {
	cora: {
		url: "https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz",
		kind: "content-cites",
		entries: ["cora.content", "cora.cites"],
		splitConvention: "seeded random 0.60/0.20/0.20",
	},
	pubmed: {
		url: "https://linqs-data.soe.ucsc.edu/public/Pubmed-Diabetes.tgz",
		kind: "pubmed-tabs",
		entries: ["Pubmed-Diabetes.NODE.paper.tab", "Pubmed-Diabetes.DIRECTED.cites.tab"],
		splitConvention: "seeded random 0.60/0.20/0.20",
	},
	"roman-empire": npzSpec("roman_empire.npz"),
	"amazon-ratings": npzSpec("amazon_ratings.npz"),
	minesweeper: npzSpec("minesweeper.npz"),
	tolokers: npzSpec("tolokers.npz"),
	questions: npzSpec("questions.npz"),
	"squirrel-filtered": npzSpec("squirrel_filtered_directed.npz"),
	"chameleon-filtered": npzSpec("chameleon_filtered_directed.npz"),
};

function npzSpec(file: string): DatasetSpec {
	return {
		url: `https://github.com/yandex-research/heterophilous-graphs/raw/main/data/${file}`,
		kind: "npz",
		splitConvention: "upstream split masks",
	};
}

export function parseNpzDataset(buf: Buffer): ParsedDataset & { masks?: MaskName[][] } {
	const arrays = readNpz(buf);
	const feats = arrays["node_features"];
	const labels = arrays["node_labels"];
	const edges = arrays["edges"];
	if (!feats || !labels || !edges) {
		throw new Error("npz is missing node_features / node_labels / edges");
	}
	const [n, d] = feats.shape;
	const rawEdges: Array<[number, number]> = [];
	for (let e = 0; e < edges.shape[0]; e++) {
		rawEdges.push([edges.data[2 * e], edges.data[2 * e + 1]]);
	}
	const labelInts = Int32Array.from(labels.data);
	const c = new Set(Array.from(labelInts)).size;

	let masks: MaskName[][] | undefined;
	if (arrays["train_masks"]) {
		const tm = arrays["train_masks"];
		const vm = arrays["val_masks"];
		const sm = arrays["test_masks"];
		const nSplits = tm.shape[0];
		masks = [];
		for (let s = 0; s < nSplits; s++) {
			const row: MaskName[] = new Array(n).fill("none");
			for (let i = 0; i < n; i++) {
				if (tm.data[s * n + i]) row[i] = "train";
				else if (vm.data[s * n + i]) row[i] = "val";
				else if (sm.data[s * n + i]) row[i] = "test";
			}
			masks.push(row);
		}
	}
	return {
		n,
		d,
		c,
		features: Float32Array.from(feats.data),
		labels: labelInts,
		rawEdges,
		classMap: {},
		masks,
	};
}

async function fetchArchive(url: string): Promise<Buffer> {
	const res = await fetch(url, { redirect: "follow" });
	if (!res.ok) throw new Error(`download failed: HTTP ${res.status} for ${url}`);
	return Buffer.from(await res.arrayBuffer());
}

export interface ConvertOptions {
	outDir: string;
	archive?: string; // local archive (or pre-extracted directory) instead of downloading
	seed?: number; // split seed for datasets without upstream splits
	split?: number; // upstream split index for datasets that ship masks
}

export async function convert(name: string, opts: ConvertOptions): Promise<ConversionManifest> {
	const spec = DATASETS[name];
	if (!spec) {
		throw new Error(`unknown dataset ${name}; known: ${Object.keys(DATASETS).join(", ")}`);
	}
	const seed = opts.seed ?? 0;
	const splitIndex = opts.split ?? 0;

	let archiveBuf: Buffer | undefined;
	let extractedDir: string | undefined;
	if (opts.archive && fs.statSync(opts.archive).isDirectory()) {
		extractedDir = opts.archive;
	} else if (opts.archive) {
		archiveBuf = fs.readFileSync(opts.archive);
	} else {
		archiveBuf = await fetchArchive(spec.url);
	}

	const readEntry = (suffix: string): Buffer => {
		if (extractedDir) {
			const direct = path.join(extractedDir, suffix);
			if (fs.existsSync(direct)) return fs.readFileSync(direct);
			// fall back to a recursive search for the basename
			const stack = [extractedDir];
			while (stack.length) {
				const dir = stack.pop()!;
				for (const e of fs.readdirSync(dir, { withFileTypes: true })) {
					const p = path.join(dir, e.name);
					if (e.isDirectory()) stack.push(p);
					else if (p.endsWith(suffix)) return fs.readFileSync(p);
				}
			}
			throw new Error(`no file ending with ${suffix} under ${extractedDir}`);
		}
		return findEntry(untar(archiveBuf!), suffix).data;
	};

	let parsed: ParsedDataset & { masks?: MaskName[][] };
	if (spec.kind === "content-cites") {
		parsed = parseContentCites(
			readEntry(spec.entries![0]).toString("utf-8"),
			readEntry(spec.entries![1]).toString("utf-8"),
		);
	} else if (spec.kind === "pubmed-tabs") {
		parsed = parsePubmedTabs(
			readEntry(spec.entries![0]).toString("utf-8"),
			readEntry(spec.entries![1]).toString("utf-8"),
		);
	} else {
		const buf = archiveBuf ?? readEntry(".npz");
		parsed = parseNpzDataset(buf);
	}

	const cleanup = cleanEdges(parsed.rawEdges, parsed.n);
	let masks: MaskName[];
	let split: ConversionManifest["split"];
	if (parsed.masks && parsed.masks.length > 0) {
		if (splitIndex >= parsed.masks.length) {
			throw new Error(`split index ${splitIndex} out of range (${parsed.masks.length} splits)`);
		}
		masks = parsed.masks[splitIndex];
		split = { convention: spec.splitConvention, index: splitIndex };
	} else {
		masks = randomSplit(parsed.n, 0.6, 0.2, seed);
		split = { convention: spec.splitConvention, seed };
	}

	fs.mkdirSync(opts.outDir, { recursive: true });
	writeEdges(path.join(opts.outDir, "edges.txt"), cleanup.edges);
	writeAtlf(path.join(opts.outDir, "features.atlf"), parsed.n, parsed.d, parsed.features);
	writeLabels(path.join(opts.outDir, "labels.txt"), parsed.labels);
	writeMasks(path.join(opts.outDir, "masks.txt"), masks);

	const manifest: ConversionManifest = {
		dataset: name,
		source: {
			url: spec.url,
			archive: opts.archive,
			archiveSha256: archiveBuf ? sha256(archiveBuf) : undefined,
		},
		files: {
			edges: fileEntry(opts.outDir, "edges.txt"),
			features: fileEntry(opts.outDir, "features.atlf"),
			labels: fileEntry(opts.outDir, "labels.txt"),
			masks: fileEntry(opts.outDir, "masks.txt"),
		},
		counts: {
			n: parsed.n,
			m_raw: cleanup.rawCount,
			m_dedup: cleanup.edges.length,
			D: parsed.d,
			C: parsed.c,
		},
		cleanup: {
			selfLoops: cleanup.selfLoops,
			duplicates: cleanup.duplicates,
			unknownEndpoints: cleanup.unknownEndpoints,
		},
		split,
		classMap: Object.keys(parsed.classMap).length ? parsed.classMap : undefined,
	};
	writeManifest(opts.outDir, manifest);
	return manifest;
}
