// Byte-offset helpers: the service addresses comment bodies by UTF-8 byte
// spans, so all slicing here goes through encode/decode instead of string
// indices. Server spans land on character boundaries; decoding is strict
// so a span that would split a code point fails loudly instead of
// corrupting the text.

const encoder = new TextEncoder();

export function encodeUtf8(text: string): Uint8Array {
  return encoder.encode(text);
}

export function byteLength(text: string): number {
  return encoder.encode(text).length;
}

export function decodeUtf8(bytes: Uint8Array): string {
  return new TextDecoder("utf-8", { fatal: true }).decode(bytes);
}

export function sliceByBytes(text: string, start: number, end: number): string {
  return decodeUtf8(encoder.encode(text).subarray(start, end));
}

export interface ByteSpan {
  start: number;
  end: number;
}

/** An atomic run of text annotated with every span layer covering it. */
export interface Segment<T extends ByteSpan> {
  text: string;
  start: number;
  end: number;
  covers: T[];
}

/**
 * Cut `text` at every span boundary and annotate each piece with the spans
 * covering it. Spans may overlap across layers (sentence vs keyword);
 * output segments are contiguous and reassemble to the original text.
 */
export function segmentByBytes<T extends ByteSpan>(text: string, spans: T[]): Segment<T>[] {
  const bytes = encoder.encode(text);
  const cuts = new Set<number>([0, bytes.length]);
  for (const span of spans) {
    cuts.add(Math.max(0, Math.min(span.start, bytes.length)));
    cuts.add(Math.max(0, Math.min(span.end, bytes.length)));
  }
  const points = [...cuts].sort((a, b) => a - b);
  const segments: Segment<T>[] = [];
  for (let i = 0; i + 1 < points.length; i++) {
    const start = points[i]!;
    const end = points[i + 1]!;
    if (end <= start) continue;
    segments.push({
      text: decodeUtf8(bytes.subarray(start, end)),
      start,
      end,
      covers: spans.filter((s) => s.start <= start && end <= s.end),
    });
  }
  return segments;
}
