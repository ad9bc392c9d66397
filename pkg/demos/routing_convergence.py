"""Watch hop-count tables converge, one gossip round at a time.

Run:  python3 demos/routing_convergence.py
"""

from swarmstore import RoutingTable, routing_round

N = 10
LINE = {i: {j for j in (i - 1, i + 1) if 0 <= j < N} for i in range(N)}


def drive(adj, rounds):
    n = len(adj)
    tables = {i: RoutingTable() for i in range(n)}
    hops = {i: 0 if i == 0 else n for i in range(n)}
    bcast = {i: 1 if i == 0 else n for i in range(n)}
    for now in range(1, rounds + 1):
        prev = dict(bcast)
        for i in range(n):
            inbox = [(j, prev[j]) for j in sorted(adj[i])]
            tables[i], hops[i], bcast[i] = routing_round(
                i, tables[i], inbox, now, hop_sentinel=n, ttl=1000)
        yield now, dict(hops)


print(f"A line of {N} agents, base station at one end. The value {N} is")
print("the 'no route yet' sentinel; watch the wavefront move right:\n")
for rnd, hops in drive(LINE, N - 1):
    cells = " ".join(f"{hops[i]:2d}" for i in range(N))
    print(f"round {rnd:2d}:  {cells}")
print(f"\nAfter exactly {N - 1} rounds every agent knows its true distance.")

COMPLETE = {i: set(range(N)) - {i} for i in range(N)}
rnd, hops = next(iter(drive(COMPLETE, 1)))
print(f"\nOn a fully connected swarm one round suffices: "
      f"{sorted(set(hops.values()))} are the only hop counts left.")
