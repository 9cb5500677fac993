"""Pure-Python Push-Relabel inner loops.

This module is the reference twin of the compiled kernel ``_kernel_c``; both
implement the exact same discharge order, FIFO bucket tie-breaking, theta
maintenance and global-relabel cadence, so flows *and* operation counters are
bit-identical between them.  Keep any change here in lockstep with the .pyx.

State layout (all per-slot / per-node int64 arrays, see network.py):
  res     residual capacity per arc slot (twin of slot e is e ^ 1)
  excess  per-node excess; terminals accumulate but are never activated
  height  per-node height labels
  in_t    byte per node; 1 while the node is on the t-side of the cut

Stats array layout:
  [0] saturating pushes   [1] non-saturating pushes  [2] relabels
  [3] gap-removal events  [4] global relabels        [5] nodes removed from T
  [6] error code (0 ok)   [7] unused

Error codes: 1 relabel found no residual neighbour, 2 relabel budget blown
(only reachable from a corrupted state), 3 height exceeded 2n in the vanilla
loop, 4 t-side heights not below theta on entry.
"""

from __future__ import annotations

ERR_NO_NEIGHBOR = 1
ERR_RELABEL_BUDGET = 2
ERR_HEIGHT_BOUND = 3
ERR_BAD_ENTRY = 4

IMPLEMENTATION = "python"


def gap_loop(n, source, sink, first_out_a, adj_a, slot_to_a, res_a, excess_a,
             height_a, in_t_a, grl_every, stats):
    """Main loop of warm-start Push-Relabel with gap relabeling.

    Processes excess on t-side nodes only; pushes stay inside T because every
    s-side node is parked at height n.  Nodes above the gap threshold leave T
    for good (height := n).  Terminates when T holds no excess.
    """
    first_out = list(first_out_a)
    adj = list(adj_a)
    slot_to = list(slot_to_a)
    res = list(res_a)
    excess = list(excess_a)
    height = list(height_a)
    in_t = list(in_t_a)

    H = n + 2
    INF = 1 << 62
    relabel_budget = 4 * n * n + 4 * n + 16

    act_head = [-1] * H
    act_tail = [-1] * H
    act_next = [-1] * n
    act_prev = [-1] * n
    active = [False] * n
    all_head = [-1] * H
    all_next = [-1] * n
    all_prev = [-1] * n
    t_count = [0] * H
    cur = list(first_out[:n])

    psat = punsat = relabels = gap_events = grls = removed = 0
    err = 0
    grl_tick = 0

    def all_add(u, h):
        nxt = all_head[h]
        all_next[u] = nxt
        all_prev[u] = -1
        if nxt >= 0:
            all_prev[nxt] = u
        all_head[h] = u

    def all_remove(u, h):
        p, x = all_prev[u], all_next[u]
        if p >= 0:
            all_next[p] = x
        else:
            all_head[h] = x
        if x >= 0:
            all_prev[x] = p

    def act_push(u, h):
        active[u] = True
        act_next[u] = -1
        tail = act_tail[h]
        act_prev[u] = tail
        if tail >= 0:
            act_next[tail] = u
        else:
            act_head[h] = u
        act_tail[h] = u

    def act_remove(u, h):
        active[u] = False
        p, x = act_prev[u], act_next[u]
        if p >= 0:
            act_next[p] = x
        else:
            act_head[h] = x
        if x >= 0:
            act_prev[x] = p
        else:
            act_tail[h] = p

    # ---- initialize t-side bookkeeping ------------------------------------
    active_count = 0
    max_act = 0
    for u in range(n):
        if in_t[u]:
            t_count[height[u]] += 1
            all_add(u, height[u])
    theta = 1
    while theta < H and t_count[theta] > 0:
        theta += 1
    for u in range(n):
        if in_t[u] and height[u] >= theta:
            err = ERR_BAD_ENTRY
            break
        if in_t[u] and u != source and u != sink and excess[u] > 0:
            act_push(u, height[u])
            active_count += 1
            if height[u] > max_act:
                max_act = height[u]

    def drain_above():
        """Expel every t-side node above theta; they never re-enter T."""
        nonlocal active_count, removed, gap_events
        count = 0
        for z in range(theta + 1, H):
            u = all_head[z]
            while u >= 0:
                nxt = all_next[u]
                in_t[u] = 0
                height[u] = n
                t_count[z] -= 1
                if active[u]:
                    act_remove(u, z)
                    active_count -= 1
                count += 1
                u = nxt
            all_head[z] = -1
        if count:
            removed += count
            gap_events += 1

    def global_relabel_t_side():
        """Exact residual BFS distances to the sink, restricted to T."""
        nonlocal theta, active_count, removed, max_act
        dist = [-1] * n
        dist[sink] = 0
        queue = [sink]
        qi = 0
        while qi < len(queue):
            v = queue[qi]
            qi += 1
            dv = dist[v]
            for k in range(first_out[v], first_out[v + 1]):
                e = adj[k]
                u = slot_to[e]
                if in_t[u] and dist[u] < 0 and res[e ^ 1] > 0:
                    dist[u] = dv + 1
                    queue.append(u)
        # Rebuild every structure from scratch; clear the active flags first
        # so drain_above cannot follow stale list pointers.
        for h in range(H):
            all_head[h] = -1
            act_head[h] = -1
            act_tail[h] = -1
            t_count[h] = 0
        for u in range(n):
            active[u] = False
        active_count = 0
        for u in range(n):
            if not in_t[u]:
                continue
            if dist[u] < 0:
                # lost every residual path to t: leaves T immediately
                in_t[u] = 0
                height[u] = n
                removed += 1
            else:
                if dist[u] > height[u]:
                    height[u] = dist[u]
                t_count[height[u]] += 1
                all_add(u, height[u])
            cur[u] = first_out[u]
        theta = 1
        while theta < H and t_count[theta] > 0:
            theta += 1
        drain_above()
        max_act = 0
        for u in range(n):
            if in_t[u] and u != source and u != sink and excess[u] > 0:
                act_push(u, height[u])
                active_count += 1
                if height[u] > max_act:
                    max_act = height[u]

    # ---- main loop ---------------------------------------------------------
    while active_count > 0 and err == 0:
        while max_act >= 0 and act_head[max_act] < 0:
            max_act -= 1
        if max_act < 0:
            break
        u = act_head[max_act]
        hu = height[u]
        while True:
            if excess[u] == 0:
                act_remove(u, hu)
                active_count -= 1
                break
            e_found = -1
            c = cur[u]
            end = first_out[u + 1]
            while c < end:
                e = adj[c]
                if res[e] > 0 and height[slot_to[e]] == hu - 1:
                    e_found = e
                    break
                c += 1
            cur[u] = c
            if e_found >= 0:
                v = slot_to[e_found]
                ru = res[e_found]
                delta = excess[u] if excess[u] < ru else ru
                if delta == ru:
                    psat += 1
                else:
                    punsat += 1
                res[e_found] = ru - delta
                res[e_found ^ 1] += delta
                excess[u] -= delta
                was = excess[v]
                excess[v] = was + delta
                if was == 0 and v != source and v != sink and in_t[v]:
                    act_push(v, height[v])
                    active_count += 1
                continue
            # relabel u
            newh = INF
            for c2 in range(first_out[u], end):
                e = adj[c2]
                if res[e] > 0:
                    hv = height[slot_to[e]]
                    if hv < newh:
                        newh = hv
            if newh >= INF:
                err = ERR_NO_NEIGHBOR
                break
            newh += 1
            relabels += 1
            grl_tick += 1
            if relabels > relabel_budget:
                err = ERR_RELABEL_BUDGET
                break
            old = hu
            t_count[old] -= 1
            all_remove(u, old)
            act_remove(u, old)
            active_count -= 1
            height[u] = newh
            t_count[newh] += 1
            all_add(u, newh)
            act_push(u, newh)
            active_count += 1
            cur[u] = first_out[u]
            if old > 0 and t_count[old] == 0:
                theta = old
                drain_above()
            else:
                if newh == theta:
                    while theta < H and t_count[theta] > 0:
                        theta += 1
                if newh > theta:
                    drain_above()
            if not in_t[u]:
                break
            hu = newh
            if hu > max_act:
                max_act = hu
            if grl_every > 0 and grl_tick >= grl_every:
                grl_tick = 0
                grls += 1
                global_relabel_t_side()
                break

    res_a[:] = type(res_a)("q", res)
    excess_a[:] = type(excess_a)("q", excess)
    height_a[:] = type(height_a)("q", height)
    in_t_a[:] = bytearray(in_t)
    stats[0] += psat
    stats[1] += punsat
    stats[2] += relabels
    stats[3] += gap_events
    stats[4] += grls
    stats[5] += removed
    stats[6] = err


def vanilla_loop(n, source, sink, first_out_a, adj_a, slot_to_a, res_a,
                 excess_a, height_a, grl_every, stats):
    """Plain Push-Relabel: discharge every non-terminal excess, heights <= 2n."""
    first_out = list(first_out_a)
    adj = list(adj_a)
    slot_to = list(slot_to_a)
    res = list(res_a)
    excess = list(excess_a)
    height = list(height_a)

    H = 2 * n + 2
    INF = 1 << 62
    relabel_budget = 4 * n * n + 4 * n + 16

    act_head = [-1] * H
    act_tail = [-1] * H
    act_next = [-1] * n
    act_prev = [-1] * n
    active = [False] * n
    cur = list(first_out[:n])

    psat = punsat = relabels = grls = 0
    err = 0
    grl_tick = 0

    def act_push(u, h):
        active[u] = True
        act_next[u] = -1
        tail = act_tail[h]
        act_prev[u] = tail
        if tail >= 0:
            act_next[tail] = u
        else:
            act_head[h] = u
        act_tail[h] = u

    def act_remove(u, h):
        active[u] = False
        p, x = act_prev[u], act_next[u]
        if p >= 0:
            act_next[p] = x
        else:
            act_head[h] = x
        if x >= 0:
            act_prev[x] = p
        else:
            act_tail[h] = p

    active_count = 0
    max_act = 0
    for u in range(n):
        if u != source and u != sink and excess[u] > 0:
            act_push(u, height[u])
            active_count += 1
            if height[u] > max_act:
                max_act = height[u]

    def global_relabel_full():
        """Distances to t; unreachable nodes get distance-to-s plus n."""
        nonlocal active_count, max_act
        dist = [-1] * n
        dist[sink] = 0
        queue = [sink]
        qi = 0
        while qi < len(queue):
            v = queue[qi]
            qi += 1
            dv = dist[v]
            for k in range(first_out[v], first_out[v + 1]):
                e = adj[k]
                u = slot_to[e]
                if dist[u] < 0 and res[e ^ 1] > 0:
                    dist[u] = dv + 1
                    queue.append(u)
        dist_s = [-1] * n
        dist_s[source] = 0
        queue = [source]
        qi = 0
        while qi < len(queue):
            v = queue[qi]
            qi += 1
            dv = dist_s[v]
            for k in range(first_out[v], first_out[v + 1]):
                e = adj[k]
                u = slot_to[e]
                if dist[u] < 0 and dist_s[u] < 0 and res[e ^ 1] > 0:
                    dist_s[u] = dv + 1
                    queue.append(u)
        for u in range(n):
            if dist[u] >= 0:
                nh = dist[u]
            elif dist_s[u] >= 0:
                nh = n + dist_s[u]
            else:
                nh = height[u]
            if nh > height[u]:
                height[u] = nh
            cur[u] = first_out[u]
        for h in range(H):
            act_head[h] = -1
            act_tail[h] = -1
        active_count = 0
        max_act = 0
        for u in range(n):
            active[u] = False
        for u in range(n):
            if u != source and u != sink and excess[u] > 0:
                act_push(u, height[u])
                active_count += 1
                if height[u] > max_act:
                    max_act = height[u]

    while active_count > 0 and err == 0:
        while max_act >= 0 and act_head[max_act] < 0:
            max_act -= 1
        if max_act < 0:
            break
        u = act_head[max_act]
        hu = height[u]
        while True:
            if excess[u] == 0:
                act_remove(u, hu)
                active_count -= 1
                break
            e_found = -1
            c = cur[u]
            end = first_out[u + 1]
            while c < end:
                e = adj[c]
                if res[e] > 0 and height[slot_to[e]] == hu - 1:
                    e_found = e
                    break
                c += 1
            cur[u] = c
            if e_found >= 0:
                v = slot_to[e_found]
                ru = res[e_found]
                delta = excess[u] if excess[u] < ru else ru
                if delta == ru:
                    psat += 1
                else:
                    punsat += 1
                res[e_found] = ru - delta
                res[e_found ^ 1] += delta
                excess[u] -= delta
                was = excess[v]
                excess[v] = was + delta
                if was == 0 and v != source and v != sink:
                    act_push(v, height[v])
                    active_count += 1
                continue
            newh = INF
            for c2 in range(first_out[u], end):
                e = adj[c2]
                if res[e] > 0:
                    hv = height[slot_to[e]]
                    if hv < newh:
                        newh = hv
            if newh >= INF:
                err = ERR_NO_NEIGHBOR
                break
            newh += 1
            if newh > 2 * n:
                err = ERR_HEIGHT_BOUND
                break
            relabels += 1
            grl_tick += 1
            if relabels > relabel_budget:
                err = ERR_RELABEL_BUDGET
                break
            act_remove(u, hu)
            height[u] = newh
            act_push(u, newh)
            cur[u] = first_out[u]
            hu = newh
            if hu > max_act:
                max_act = hu
            if grl_every > 0 and grl_tick >= grl_every:
                grl_tick = 0
                grls += 1
                global_relabel_full()
                break

    res_a[:] = type(res_a)("q", res)
    excess_a[:] = type(excess_a)("q", excess)
    height_a[:] = type(height_a)("q", height)
    stats[0] += psat
    stats[1] += punsat
    stats[2] += relabels
    stats[4] += grls
    stats[6] = err
