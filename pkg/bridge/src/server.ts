/**
 * Request loop: one response line per request line, order preserving.
 *
 * Errors never kill the loop: a malformed line answers with id
 * "unknown", a failing or missing model answers with an error status,
 * and the process keeps serving.
 */

import readline from "node:readline";
import type { Readable, Writable } from "node:stream";

import { MODELS } from "./models.js";
import {
  BridgeResponse,
  ProtocolError,
  encodeResponse,
  errorResponse,
  okResponse,
  parseRequest,
} from "./protocol.js";

export function handleLine(line: string): BridgeResponse {
  let request;
  try {
    request = parseRequest(line);
  } catch (err) {
    if (err instanceof ProtocolError) {
      return errorResponse(err.requestId ?? "unknown", err.message);
    }
    return errorResponse("unknown", String(err));
  }
  const model = MODELS.get(request.model);
  if (model === undefined) {
    return errorResponse(request.id, `unknown model '${request.model}'`);
  }
  try {
    return okResponse(request.id, model(request));
  } catch (err) {
    return errorResponse(request.id, (err as Error).message);
  }
}

export async function serve(input: Readable, output: Writable): Promise<void> {
  const rl = readline.createInterface({
    input,
    crlfDelay: Number.POSITIVE_INFINITY,
  });
  for await (const line of rl) {
    if (line.trim().length === 0) {
      continue;
    }
    output.write(encodeResponse(handleLine(line)) + "\n");
  }
}
