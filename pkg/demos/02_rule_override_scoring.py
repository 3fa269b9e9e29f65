"""Why overriding model predictions with deterministic rules helps.

The bundled mini-corpus carries gold annotations; the companion predictions
file simulates an imperfect model (30% of entities dropped, 10% mislabeled).
Scoring before and after the rule override shows the recall recovery.
"""

import taxisentinel as ts
from taxisentinel.evaluation import corpus_stats, load_annotations, load_predictions

gold = load_annotations(ts.data_path("fixtures/mini_corpus.json"))
external = load_predictions(ts.data_path("fixtures/mini_corpus_external.json"))
rules = ts.compile_ruleset()

stats = corpus_stats({"mini": gold})["mini"]
print(f"mini corpus: {len(gold)} utterances, {stats['total']} entities")
for label, count in stats["counts"].items():
    print(f"  {label:<12} {count:>3}  ({stats['percentages'][label]:.1f}%)")

raw = ts.score(gold, external)
merged_spans = [
    ts.merge_override(preds, ts.match_rules(rules, utt.text))
    for utt, preds in zip(gold, external)
]
merged = ts.score(gold, merged_spans)

print("\n                P       R       F1")
print(f"external only  {raw.precision:.3f}   {raw.recall:.3f}   {raw.f1:.3f}")
print(f"rule override  {merged.precision:.3f}   {merged.recall:.3f}   {merged.f1:.3f}")
print("\nthe override restores every rule-covered entity the model dropped and")
print("replaces mislabeled spans wherever a rule claims the same region.")
