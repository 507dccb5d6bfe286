"""Independent oracle for the corpus summary of a JSONL log (numpy + networkx).

usage: oracle_stats.py LOG.jsonl OUT.json
"""
import json
import statistics
import sys
from datetime import datetime, timezone

import networkx as nx
import numpy as np

DAY = 86400
HOUR = 3600


def utc(ts):
    return datetime.fromtimestamp(ts, timezone.utc)


def main(path, out):
    recs = [json.loads(line) for line in open(path) if line.strip()]
    agents = sorted({r["sender"] for r in recs} | {x for r in recs for x in r["recipients"]})
    ts = sorted(r["ts"] for r in recs)

    sent = {a: 0 for a in agents}
    for r in recs:
        sent[r["sender"]] += 1

    def monday(t):
        d = utc(t)
        return (t - t % DAY) - d.weekday() * DAY

    first_week, last_week = monday(ts[0]), monday(ts[-1])
    weeks = {w: 0 for w in range(first_week, last_week + 1, 7 * DAY)}
    for t in ts:
        weeks[monday(t)] += 1

    start = ts[0] - ts[0] % DAY
    end = ts[-1] - ts[-1] % DAY + DAY
    hours = np.zeros((end - start) // HOUR)
    for t in ts:
        hours[(t - start) // HOUR] += 1
    weekday = [utc(start + h * HOUR).weekday() < 5 for h in range(len(hours))]
    pairs = [(hours[h], hours[h + 24]) for h in range(len(hours) - 24) if weekday[h] and weekday[h + 24]]
    r24 = 0.0
    if len(pairs) >= 2:
        x, y = np.array(pairs).T
        if x.std() > 0 and y.std() > 0:
            r24 = float(np.corrcoef(x, y)[0, 1])

    by_sender = {}
    for r in recs:
        by_sender.setdefault(r["sender"], []).append(r["ts"])
    bursts = []
    for times in by_sender.values():
        if len(times) < 3:
            continue
        gaps = np.diff(sorted(times)).astype(float)
        mu, sigma = gaps.mean(), gaps.std()
        if mu > 0:
            bursts.append((sigma - mu) / (sigma + mu))

    g = nx.DiGraph()
    for r in recs:
        for x in r["recipients"]:
            if x != r["sender"]:
                g.add_edge(r["sender"], x)
    u = g.to_undirected()

    stats = {
        "n_agents": len(agents),
        "time_span": {"start": ts[0], "end": ts[-1]},
        "total_events": len(recs),
        "median_events_per_agent": float(statistics.median(sent.values())),
        "median_events_per_week": float(statistics.median(weeks.values())),
        "r24": r24,
        "weekend_ratio": sum(utc(t).weekday() >= 5 for t in ts) / len(ts),
        "burstiness_median": float(statistics.median(bursts)) if bursts else None,
        "density": nx.density(g),
        "transitivity": nx.transitivity(u),
        "global_efficiency": nx.global_efficiency(u),
        "reciprocity": nx.overall_reciprocity(g),
    }
    with open(out, "w") as f:
        json.dump(stats, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main(*sys.argv[1:3])
