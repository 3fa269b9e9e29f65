"""From a raw tower transcript to the structured information table.

Walks the full extraction path on the bundled Haneda recording: compile the
phraseology rules, inspect the spans they produce on one utterance, then build
the whole table with destination linking and runway carry-forward.
"""

import taxisentinel as ts

rules = ts.compile_ruleset()
print("rule inventory:", rules.label_counts())

utterance = "Japan Air 179, Tokyo Tower, good evening, number 3, taxi to holding point C1."
print(f"\nutterance: {utterance}")
for span in ts.match_rules(rules, utterance):
    print(f"  [{span.start:>3},{span.end:>3}) {span.label.value:<12} {span.surface!r}  (rule {span.rule_id})")

graph = ts.load_graph(ts.data_path("fixtures/haneda_graph.json"))
transcript = ts.read_transcript_jsonl(ts.data_path("fixtures/haneda_transcript.jsonl"))
result = ts.build_info_table(transcript, rules, graph=graph)
rows = ts.carry_forward(result.rows)

print(f"\ninfo table ({len(rows)} rows, {len(result.skipped)} utterances without a callsign):")
header = f"{'TIME':<9} {'CALLSIGN':<14} {'ACSTATE':<22} {'RWY':<4} DESTINATION"
print(header)
print("-" * len(header))
for row in rows:
    print(f"{row.time:<9} {row.callsign:<14} {','.join(row.ac_state):<22} "
          f"{row.dest_runway or '':<4} {row.destination_display}")

print("\ncanonical callsigns seen:", sorted({r.callsign_norm for r in rows}))
