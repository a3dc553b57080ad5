/**
 * Entry point. Default transport is stdio; `--tcp PORT` serves the
 * same request loop to each TCP connection (one request in flight per
 * connection, matching the harness client).
 */

import net from "node:net";
import process from "node:process";

import { serve } from "./server.js";

function main(): void {
  const args = process.argv.slice(2);
  const tcpIndex = args.indexOf("--tcp");
  if (tcpIndex >= 0) {
    const port = Number.parseInt(args[tcpIndex + 1] ?? "", 10);
    if (!Number.isInteger(port) || port < 0) {
      process.stderr.write("usage: main.js [--tcp PORT]\n");
      process.exit(2);
    }
    const server = net.createServer((socket) => {
      void serve(socket, socket).finally(() => socket.end());
    });
    server.listen(port, () => {
      const address = server.address();
      const bound = typeof address === "object" && address ? address.port : port;
      process.stderr.write(`bridge listening on tcp:${bound}\n`);
    });
    return;
  }
  void serve(process.stdin, process.stdout).then(() => process.exit(0));
}

main();
