/**
 * Reader for .npz containers (a ZIP of .npy arrays), covering the dtypes
 * the heterophily benchmark releases use: f4/f8, i4/i8, u1, and booleans,
 * in C order.
 */

import * as zlib from "node:zlib";

export interface NpyArray {
	shape: number[];
	/** flat C-order values; booleans become 0/1 */
	data: Float64Array;
	dtype: string;
}

const EOCD_SIG = 0x06054b50;
const CENTRAL_SIG = 0x02014b50;

interface ZipEntry {
	name: string;
	data: Buffer;
}

export function unzip(buf: Buffer): ZipEntry[] {
	// locate end-of-central-directory (no comment in npz files, but scan anyway)
	let eocd = -1;
	for (let i = buf.length - 22; i >= 0 && i >= buf.length - 22 - 65536; i--) {
		if (buf.readUInt32LE(i) === EOCD_SIG) {
			eocd = i;
			break;
		}
	}
	if (eocd < 0) throw new Error("not a ZIP container (no end-of-central-directory)");
	const count = buf.readUInt16LE(eocd + 10);
	let off = buf.readUInt32LE(eocd + 16);
	const entries: ZipEntry[] = [];
	for (let k = 0; k < count; k++) {
		if (buf.readUInt32LE(off) !== CENTRAL_SIG) throw new Error("bad central directory");
		const method = buf.readUInt16LE(off + 10);
		const compSize = buf.readUInt32LE(off + 20);
		const nameLen = buf.readUInt16LE(off + 28);
		const extraLen = buf.readUInt16LE(off + 30);
		const commentLen = buf.readUInt16LE(off + 32);
		const localOff = buf.readUInt32LE(off + 42);
		const name = buf.subarray(off + 46, off + 46 + nameLen).toString("utf-8");

		const localNameLen = buf.readUInt16LE(localOff + 26);
		const localExtraLen = buf.readUInt16LE(localOff + 28);
		const dataStart = localOff + 30 + localNameLen + localExtraLen;
		const raw = buf.subarray(dataStart, dataStart + compSize);
		const data = method === 8 ? zlib.inflateRawSync(raw) : Buffer.from(raw);
		entries.push({ name, data });
		off += 46 + nameLen + extraLen + commentLen;
	}
	return entries;
}

export function parseNpy(buf: Buffer): NpyArray {
	if (buf.subarray(0, 6).toString("latin1") !== "\x93NUMPY") {
		throw new Error("not an npy payload");
	}
	const major = buf[6];
	const headerLen = major >= 2 ? buf.readUInt32LE(8) : buf.readUInt16LE(8);
	const headerStart = major >= 2 ? 12 : 10;
	const header = buf.subarray(headerStart, headerStart + headerLen).toString("ascii");
	const descr = /'descr':\s*'([^']+)'/.exec(header)?.[1];
	const fortran = /'fortran_order':\s*(True|False)/.exec(header)?.[1] === "True";
	const shapeText = /'shape':\s*\(([^)]*)\)/.exec(header)?.[1] ?? "";
	const shape = shapeText
		.split(",")
		.map((s) => s.trim())
		.filter((s) => s.length > 0)
		.map((s) => parseInt(s, 10));
	if (!descr) throw new Error("npy header missing descr");
	if (fortran) throw new Error("fortran-order arrays not supported");

	const count = shape.reduce((a, b) => a * b, 1);
	const body = buf.subarray(headerStart + headerLen);
	const out = new Float64Array(count);
	const little = descr[0] !== ">";
	const kind = descr.replace(/^[<>|=]/, "");
	for (let i = 0; i < count; i++) {
		switch (kind) {
			case "f4":
				out[i] = little ? body.readFloatLE(4 * i) : body.readFloatBE(4 * i);
				break;
			case "f8":
				out[i] = little ? body.readDoubleLE(8 * i) : body.readDoubleBE(8 * i);
				break;
			case "i4":
				out[i] = little ? body.readInt32LE(4 * i) : body.readInt32BE(4 * i);
				break;
			case "i8": {
				const v = little ? body.readBigInt64LE(8 * i) : body.readBigInt64BE(8 * i);
				out[i] = Number(v);
				break;
			}
			case "u1":
			case "b1":
				out[i] = body[i];
				break;
			default:
				throw new Error(`unsupported npy dtype ${descr}`);
		}
	}
	return { shape, data: out, dtype: kind };
}

export function readNpz(buf: Buffer): Record<string, NpyArray> {
	const out: Record<string, NpyArray> = {};
	for (const entry of unzip(buf)) {
		out[entry.name.replace(/\.npy$/, "")] = parseNpy(entry.data);
	}
	return out;
}
