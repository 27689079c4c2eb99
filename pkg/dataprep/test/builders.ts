/** Fixture builders: minimal tar/gzip, zip, and npy writers for tests. */

import * as zlib from "node:zlib";

export function buildTar(files: Array<{ name: string; data: Buffer | string }>): Buffer {
	const blocks: Buffer[] = [];
	for (const f of files) {
		const data = Buffer.isBuffer(f.data) ? f.data : Buffer.from(f.data);
		const header = Buffer.alloc(512);
		header.write(f.name, 0, "ascii");
		header.write("0000644\0", 100, "ascii"); // mode
		header.write("0000000\0", 108, "ascii"); // uid
		header.write("0000000\0", 116, "ascii"); // gid
		header.write(data.length.toString(8).padStart(11, "0") + "\0", 124, "ascii");
		header.write("00000000000\0", 136, "ascii"); // mtime
		header.write("        ", 148, "ascii"); // checksum placeholder
		header.write("0", 156, "ascii"); // regular file
		header.write("ustar  \0", 257, "ascii");
		let sum = 0;
		for (const b of header) sum += b;
		header.write(sum.toString(8).padStart(6, "0") + "\0 ", 148, "ascii");
		blocks.push(header, data);
		const pad = (512 - (data.length % 512)) % 512;
		if (pad) blocks.push(Buffer.alloc(pad));
	}
	blocks.push(Buffer.alloc(1024));
	return Buffer.concat(blocks);
}

export function buildTgz(files: Array<{ name: string; data: Buffer | string }>): Buffer {
	return zlib.gzipSync(buildTar(files));
}

export function buildNpy(
	dtype: string,
	shape: number[],
	values: number[],
): Buffer {
	const dict = `{'descr': '${dtype}', 'fortran_order': False, 'shape': (${shape.join(", ")}${shape.length === 1 ? "," : ""}), }`;
	const padded = dict + " ".repeat((64 - ((10 + dict.length + 1) % 64)) % 64) + "\n";
	const header = Buffer.alloc(10);
	header.write("\x93NUMPY", 0, "latin1");
	header[6] = 1;
	header[7] = 0;
	header.writeUInt16LE(padded.length, 8);

	let body: Buffer;
	const kind = dtype.replace(/^[<>|=]/, "");
	if (kind === "f4") {
		body = Buffer.from(Float32Array.from(values).buffer);
	} else if (kind === "f8") {
		body = Buffer.from(Float64Array.from(values).buffer);
	} else if (kind === "i8") {
		body = Buffer.from(BigInt64Array.from(values.map(BigInt)).buffer);
	} else if (kind === "i4") {
		body = Buffer.from(Int32Array.from(values).buffer);
	} else if (kind === "b1" || kind === "u1") {
		body = Buffer.from(Uint8Array.from(values));
	} else {
		throw new Error(`builder does not support ${dtype}`);
	}
	return Buffer.concat([header, Buffer.from(padded, "ascii"), body]);
}

const CRC_TABLE = (() => {
	const table = new Uint32Array(256);
	for (let i = 0; i < 256; i++) {
		let c = i;
		for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
		table[i] = c >>> 0;
	}
	return table;
})();

function crc32(buf: Buffer): number {
	let c = 0xffffffff;
	for (const b of buf) c = CRC_TABLE[(c ^ b) & 0xff] ^ (c >>> 8);
	return (c ^ 0xffffffff) >>> 0;
}

export function buildZip(
	files: Array<{ name: string; data: Buffer; deflate?: boolean }>,
): Buffer {
	const locals: Buffer[] = [];
	const centrals: Buffer[] = [];
	let offset = 0;
	for (const f of files) {
		const stored = f.deflate ? zlib.deflateRawSync(f.data) : f.data;
		const method = f.deflate ? 8 : 0;
		const crc = crc32(f.data);
		const name = Buffer.from(f.name, "utf-8");

		const local = Buffer.alloc(30);
		local.writeUInt32LE(0x04034b50, 0);
		local.writeUInt16LE(20, 4);
		local.writeUInt16LE(method, 8);
		local.writeUInt32LE(crc, 14);
		local.writeUInt32LE(stored.length, 18);
		local.writeUInt32LE(f.data.length, 22);
		local.writeUInt16LE(name.length, 26);
		locals.push(local, name, stored);

		const central = Buffer.alloc(46);
		central.writeUInt32LE(0x02014b50, 0);
		central.writeUInt16LE(20, 6);
		central.writeUInt16LE(method, 10);
		central.writeUInt32LE(crc, 16);
		central.writeUInt32LE(stored.length, 20);
		central.writeUInt32LE(f.data.length, 24);
		central.writeUInt16LE(name.length, 28);
		central.writeUInt32LE(offset, 42);
		centrals.push(central, name);

		offset += 30 + name.length + stored.length;
	}
	const centralStart = offset;
	const centralBuf = Buffer.concat(centrals);
	const eocd = Buffer.alloc(22);
	eocd.writeUInt32LE(0x06054b50, 0);
	eocd.writeUInt16LE(files.length, 8);
	eocd.writeUInt16LE(files.length, 10);
	eocd.writeUInt32LE(centralBuf.length, 12);
	eocd.writeUInt32LE(centralStart, 16);
	return Buffer.concat([...locals, centralBuf, eocd]);
}
