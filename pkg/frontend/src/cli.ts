#!/usr/bin/env node
/** Render one or more figure specs: kgchain-figure spec.json [more.json ...] */

import { ArtifactError } from "./artifacts.js";
import { renderSpecFile } from "./render.js";

function main(argv: string[]): number {
  const specs = argv.filter((a) => !a.startsWith("-"));
  if (!specs.length) {
    console.error("usage: kgchain-figure spec.json [spec2.json ...]");
    return 2;
  }
  for (const spec of specs) {
    try {
      renderSpecFile(spec);
      console.log(`rendered ${spec}`);
    } catch (err) {
      if (err instanceof ArtifactError) {
        console.error(`figure error in ${spec}: ${err.message}`);
        return 2;
      }
      throw err;
    }
  }
  return 0;
}

process.exitCode = main(process.argv.slice(2));
