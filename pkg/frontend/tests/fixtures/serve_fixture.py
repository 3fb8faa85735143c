"""Spin up a small reader-study backend for the frontend e2e test.

Writes {out}/assignments.json (server-side arm truth for assertions) and
prints the bound port on stdout once listening.
"""

import json
import sys
from pathlib import Path

from cxrkit.corpus import SynthConfig, synth_generate, write_synth_dataset
from cxrkit.study import CaseRecord, Reader, assign_cases, build_study_config, serve_study

out = Path(sys.argv[1])
out.mkdir(parents=True, exist_ok=True)

items = synth_generate(SynthConfig(n_images=420, seed=77))
pairs = write_synth_dataset(items, out / "data")
test_pairs = [(r, a) for r, a in pairs if r.split == "test"][:50]

cases = []
for i, (rec, ann) in enumerate(test_pairs):
    cases.append(CaseRecord(
        case_id=f"case{i:03d}",
        images=(rec.pixels_ref,),
        indication=ann.sections["indication"],
        model_draft=ann.sections["findings"],
        resident_draft=(ann.sections["findings"] + " Checked.") if i % 2 == 0 else None,
    ))
readers = [Reader("res0", "resident"), Reader("att0", "attending")]
cfg = build_study_config(cases, readers, seed=11)

assignments = assign_cases(cfg)
with open(out / "assignments.json", "w") as f:
    json.dump({reader: [(a.case_id, a.arm) for a in plan]
               for reader, plan in assignments.items()}, f)

server, _service = serve_study(cfg, 0, log_path=out / "events.jsonl")
print(server.server_address[1], flush=True)
server.serve_forever()
