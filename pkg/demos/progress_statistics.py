"""Empirical per-iteration progress against the thresholds the analysis promises."""

import json

from hamcongest.harness import validate_lemmas

rep = validate_lemmas(samples=400, n_values=(32, 64))
print(json.dumps(rep.to_record(), indent=2, sort_keys=True))
