/**
 * Minimal tar / tar.gz reader: enough to pull the data files out of the
 * benchmark release archives without shelling out.
 */

import * as zlib from "node:zlib";

export interface TarEntry {
	name: string;
	data: Buffer;
}

function parseOctal(buf: Buffer): number {
	const s = buf.toString("ascii").replace(/\0/g, "").trim();
	return s ? parseInt(s, 8) : 0;
}

export function untar(archive: Buffer): TarEntry[] {
	let buf = archive;
	if (buf.length >= 2 && buf[0] === 0x1f && buf[1] === 0x8b) {
		buf = zlib.gunzipSync(buf);
	}
	const entries: TarEntry[] = [];
	let off = 0;
	while (off + 512 <= buf.length) {
		const header = buf.subarray(off, off + 512);
		if (header.every((b) => b === 0)) break; // end-of-archive blocks
		let name = header.subarray(0, 100).toString("ascii").replace(/\0.*$/, "");
		const prefix = header.subarray(345, 500).toString("ascii").replace(/\0.*$/, "");
		if (prefix) name = `${prefix}/${name}`;
		const size = parseOctal(header.subarray(124, 136));
		const type = String.fromCharCode(header[156]);
		const body = buf.subarray(off + 512, off + 512 + size);
		if (type === "0" || type === "\0" || type === "") {
			entries.push({ name, data: Buffer.from(body) });
		}
		off += 512 + Math.ceil(size / 512) * 512;
	}
	return entries;
}

/** Find an archive entry whose path ends with the given suffix. */
export function findEntry(entries: TarEntry[], suffix: string): TarEntry {
	const hit = entries.find((e) => e.name.endsWith(suffix));
	if (!hit) {
		const names = entries.slice(0, 10).map((e) => e.name).join(", ");
		throw new Error(`archive has no entry ending with ${suffix} (saw: ${names} ...)`);
	}
	return hit;
}
