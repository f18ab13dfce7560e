"""
Scoring a synthetic corpus
==========================

Without a hand-labelled speech database, a seeded synthetic corpus gives exact
ground truth. Deviation is the absolute frame error as a percentage of the true
segment length, averaged per speaker group.
"""

from wcsed import aggregate_report, analyze, random_corpus, synthesize_test_signal

items = random_corpus(30, seed=11)
scored = []
for item in items:
    signal, label = synthesize_test_signal(item)
    scored.append((item.name, label, analyze(signal).endpoints))

report = aggregate_report(scored)
print(f"{'group':<24}{'start %':>10}{'end %':>10}")
for group, start, end in report.table_rows():
    print(f"{group:<24}{start:>10.3f}{end:>10.3f}")

###############################################################################
# The worst items, for a closer look.
worst = sorted(report.items, key=lambda r: -(r[2] + r[3]))[:3]
for name, group, s, e in worst:
    print(name, group, f"{s:.2f}", f"{e:.2f}")
