#!/usr/bin/env node
/**
 * prep <dataset> --out DIR [--archive PATH] [--seed N] [--split K]
 *
 * Converts a public benchmark release to the toolkit's dataset layout.
 * --archive points at a downloaded .tgz/.npz (or a pre-extracted
 * directory) for offline use; otherwise the canonical URL is fetched.
 */

import { convert, DATASETS } from "./convert.js";

function usage(): never {
	console.error("usage: prep <dataset> --out DIR [--archive PATH] [--seed N] [--split K]");
	console.error(`datasets: ${Object.keys(DATASETS).join(", ")}`);
	process.exit(2);
}

async function main(argv: string[]): Promise<number> {
	const args = argv.slice(2);
	if (args.length === 0 || args[0].startsWith("-")) usage();
	const name = args[0];
	let out: string | undefined;
	let archive: string | undefined;
	let seed: number | undefined;
	let split: number | undefined;
	for (let i = 1; i < args.length; i++) {
		const take = () => {
			i += 1;
			if (i >= args.length) usage();
			return args[i];
		};
		switch (args[i]) {
			case "--out":
				out = take();
				break;
			case "--archive":
				archive = take();
				break;
			case "--seed":
				seed = parseInt(take(), 10);
				break;
			case "--split":
				split = parseInt(take(), 10);
				break;
			default:
				usage();
		}
	}
	if (!out) usage();
	try {
		const manifest = await convert(name, { outDir: out, archive, seed, split });
		const c = manifest.counts;
		console.log(
			`${manifest.dataset}: n=${c.n} D=${c.D} C=${c.C} ` +
				`edges ${c.m_raw} raw -> ${c.m_dedup} undirected ` +
				`(self-loops ${manifest.cleanup.selfLoops}, duplicates ${manifest.cleanup.duplicates})`,
		);
		console.log(`wrote ${out}/{edges.txt,features.atlf,labels.txt,masks.txt,manifest.json}`);
		return 0;
	} catch (err) {
		console.error(`error: ${err instanceof Error ? err.message : err}`);
		return 1;
	}
}

main(process.argv).then((code) => process.exit(code));
