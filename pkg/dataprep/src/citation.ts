/**
 * Converters for the classic citation-network text distributions.
 *
 * Cora ships as `cora.content` (one node per line: id, 1433 binary word
 * flags, class name) and `cora.cites` (one directed citation per line).
 * PubMed ships as two `.tab` files with a schema line naming the 500
 * TF-IDF word features and `key=value` node rows.
 */

export interface ParsedDataset {
	n: number;
	d: number;
	c: number;
	features: Float32Array; // row-major n x d
	labels: Int32Array;
	rawEdges: Array<[number, number]>;
	classMap: Record<string, number>;
}

export function parseContentCites(content: string, cites: string): ParsedDataset {
	const idToRow = new Map<string, number>();
	const featureRows: number[][] = [];
	const classNames: string[] = [];
	for (const line of content.split("\n")) {
		const trimmed = line.trim();
		if (!trimmed) continue;
		const parts = trimmed.split(/\s+/);
		if (parts.length < 3) throw new Error(`bad content line: ${trimmed.slice(0, 60)}`);
		const id = parts[0];
		if (idToRow.has(id)) throw new Error(`duplicate node id ${id}`);
		idToRow.set(id, featureRows.length);
		featureRows.push(parts.slice(1, -1).map(Number));
		classNames.push(parts[parts.length - 1]);
	}
	const n = featureRows.length;
	const d = featureRows[0].length;
	for (const row of featureRows) {
		if (row.length !== d) throw new Error("inconsistent feature width in content file");
	}

	// class ids by sorted class name, so conversion is order-independent
	const classMap: Record<string, number> = {};
	for (const name of [...new Set(classNames)].sort()) {
		classMap[name] = Object.keys(classMap).length;
	}
	const labels = new Int32Array(n);
	classNames.forEach((name, i) => (labels[i] = classMap[name]));

	const features = new Float32Array(n * d);
	featureRows.forEach((row, i) => features.set(row, i * d));

	const rawEdges: Array<[number, number]> = [];
	for (const line of cites.split("\n")) {
		const trimmed = line.trim();
		if (!trimmed) continue;
		const [a, b] = trimmed.split(/\s+/);
		rawEdges.push([idToRow.get(a) ?? -1, idToRow.get(b) ?? -1]);
	}
	return { n, d, c: Object.keys(classMap).length, features, labels, rawEdges, classMap };
}

export function parsePubmedTabs(nodeTab: string, citesTab: string): ParsedDataset {
	const nodeLines = nodeTab.split("\n");
	if (nodeLines.length < 3) throw new Error("node table too short");
	// schema line declares the word-feature order: "numeric:w-xxx:0.0" fields
	const schema = nodeLines[1].split("\t");
	const words: string[] = [];
	for (const field of schema) {
		const m = /^numeric:([^:]+):/.exec(field.trim());
		if (m) words.push(m[1]);
	}
	if (words.length === 0) throw new Error("no numeric features declared in schema line");
	const wordCol = new Map(words.map((w, j) => [w, j]));

	const idToRow = new Map<string, number>();
	const rows: Float32Array[] = [];
	const labelList: number[] = [];
	for (const line of nodeLines.slice(2)) {
		const trimmed = line.trim();
		if (!trimmed) continue;
		const parts = trimmed.split("\t");
		const id = parts[0];
		const row = new Float32Array(words.length);
		let label = -1;
		for (const tok of parts.slice(1)) {
			const eq = tok.indexOf("=");
			if (eq < 0) continue;
			const key = tok.slice(0, eq);
			const val = tok.slice(eq + 1);
			if (key === "label") {
				label = parseInt(val, 10) - 1; // upstream labels are 1-based
			} else {
				const col = wordCol.get(key);
				if (col !== undefined) row[col] = parseFloat(val);
			}
		}
		if (label < 0) throw new Error(`node ${id} has no label`);
		idToRow.set(id, rows.length);
		rows.push(row);
		labelList.push(label);
	}
	const n = rows.length;
	const d = words.length;
	const features = new Float32Array(n * d);
	rows.forEach((row, i) => features.set(row, i * d));

	const rawEdges: Array<[number, number]> = [];
	for (const line of citesTab.split("\n").slice(2)) {
		const refs = [...line.matchAll(/paper:(\S+)/g)].map((m) => m[1]);
		if (refs.length !== 2) continue;
		rawEdges.push([idToRow.get(refs[0]) ?? -1, idToRow.get(refs[1]) ?? -1]);
	}
	const classMap: Record<string, number> = {};
	for (const k of new Set(labelList)) classMap[String(k + 1)] = k;
	return {
		n,
		d,
		c: new Set(labelList).size,
		features,
		labels: Int32Array.from(labelList),
		rawEdges,
		classMap,
	};
}
