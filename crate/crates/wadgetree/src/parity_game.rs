//! Max-parity games and two independent solvers.
//!
//! A parity game is played on a finite directed graph where every position
//! has at least one successor. Each position has a priority and an owner;
//! the owner moves the token along an edge. An infinite play is won by
//! [`Player::Even`] when the highest priority occurring infinitely often is
//! even, otherwise by [`Player::Odd`]. Both players have positional winning
//! strategies on their winning regions.
//!
//! Emptiness of a tree automaton reduces to such a game, and that check
//! underpins every later analysis, so this module deliberately contains two
//! solvers built on unrelated principles:
//!
//! - [`solve_recursive`]: attractor decomposition recursing on the highest
//!   priority; also extracts a positional strategy for each winner.
//! - [`solve_progress_measures`]: least fixpoint of the lifting operator on
//!   small progress measures; returns winners only.
//!
//! Production callers use the recursive solver; the tests (and the
//! repository's acceptance checks) run both on the same inputs and demand
//! identical winning regions.

/// The two players. `Even` wins a play when the maximal priority seen
/// infinitely often is even.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    pub fn of_priority(p: u32) -> Player {
        if p % 2 == 0 {
            Player::Even
        } else {
            Player::Odd
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }
}

/// A finite max-parity game. Every position must have at least one move.
#[derive(Clone, Debug)]
pub struct ParityGame {
    owner: Vec<Player>,
    priority: Vec<u32>,
    moves: Vec<Vec<usize>>,
}

/// Winning regions and, for each position its winner owns, a positional move.
#[derive(Clone, Debug)]
pub struct Solution {
    pub winner: Vec<Player>,
    /// `strategy[v]` is a winning move at `v` when `owner(v)` wins `v`.
    pub strategy: Vec<Option<usize>>,
}

impl ParityGame {
    pub fn new(owner: Vec<Player>, priority: Vec<u32>, moves: Vec<Vec<usize>>) -> Self {
        let n = owner.len();
        assert_eq!(priority.len(), n, "one priority per position");
        assert_eq!(moves.len(), n, "one move list per position");
        for succs in &moves {
            assert!(!succs.is_empty(), "every position needs a move");
            assert!(succs.iter().all(|&t| t < n), "move target out of range");
        }
        ParityGame { owner, priority, moves }
    }

    pub fn num_positions(&self) -> usize {
        self.owner.len()
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn priority(&self, v: usize) -> u32 {
        self.priority[v]
    }

    pub fn moves(&self, v: usize) -> &[usize] {
        &self.moves[v]
    }
}

/// Positions from which `player` can force the token into `seed` while the
/// play stays inside `active`. Records the forcing move for positions owned
/// by `player` that enter the attractor via an edge (seed positions keep
/// whatever is already in `strategy`).
///
/// On return, a `player`-owned position outside the attractor has no move
/// into it, and an opponent position outside has a move avoiding it; hence
/// removing an attractor never strands a position without moves.
fn attractor(
    game: &ParityGame,
    active: &[bool],
    seed: &[usize],
    player: Player,
    strategy: &mut [Option<usize>],
) -> Vec<bool> {
    let n = game.num_positions();
    let mut inside = vec![false; n];
    for &v in seed {
        debug_assert!(active[v]);
        inside[v] = true;
    }
    // Closure by rescanning: the games this crate builds are small, so a
    // quadratic sweep is simpler than predecessor lists and fast enough.
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if !active[v] || inside[v] {
                continue;
            }
            if game.owner(v) == player {
                if let Some(&t) = game.moves(v).iter().find(|&&t| active[t] && inside[t]) {
                    inside[v] = true;
                    strategy[v] = Some(t);
                    changed = true;
                }
            } else if game.moves(v).iter().all(|&t| !active[t] || inside[t]) {
                inside[v] = true;
                changed = true;
            }
        }
    }
    inside
}

fn zielonka(
    game: &ParityGame,
    active: &mut Vec<bool>,
    winner: &mut [Player],
    strategy: &mut [Option<usize>],
) {
    let verts: Vec<usize> = (0..game.num_positions()).filter(|&v| active[v]).collect();
    if verts.is_empty() {
        return;
    }
    debug_assert!(
        verts.iter().all(|&v| game.moves(v).iter().any(|&t| active[t])),
        "attractor removal must never strand a position"
    );
    let top = verts.iter().map(|&v| game.priority(v)).max().unwrap();
    let us = Player::of_priority(top);
    let seed: Vec<usize> = verts.iter().copied().filter(|&v| game.priority(v) == top).collect();
    let ours = attractor(game, active, &seed, us, strategy);

    let mut sub: Vec<bool> = active.iter().zip(&ours).map(|(&a, &i)| a && !i).collect();
    zielonka(game, &mut sub, winner, strategy);

    let them = us.opponent();
    let lost: Vec<usize> = (0..game.num_positions())
        .filter(|&v| active[v] && !ours[v] && winner[v] == them)
        .collect();
    if lost.is_empty() {
        // We win the whole active region: attract to the top priority
        // forever, or defer to the subgame strategy below it.
        for &v in &verts {
            winner[v] = us;
        }
        for &v in &seed {
            if game.owner(v) == us {
                strategy[v] = game.moves(v).iter().copied().find(|&t| active[t]);
            }
        }
    } else {
        let theirs = attractor(game, active, &lost, them, strategy);
        let mut rest: Vec<bool> = active.iter().zip(&theirs).map(|(&a, &i)| a && !i).collect();
        zielonka(game, &mut rest, winner, strategy);
        for v in 0..game.num_positions() {
            if active[v] && theirs[v] {
                winner[v] = them;
            }
        }
    }
}

/// Solves by attractor decomposition; returns winners and positional
/// strategies for both players on their regions.
pub fn solve_recursive(game: &ParityGame) -> Solution {
    let n = game.num_positions();
    let mut active = vec![true; n];
    let mut winner = vec![Player::Even; n];
    let mut strategy = vec![None; n];
    zielonka(game, &mut active, &mut winner, &mut strategy);
    Solution { winner, strategy }
}

/// A progress measure: a counter per odd priority (most significant first),
/// or the top element absorbing everything.
#[derive(Clone, PartialEq, Eq, Debug)]
enum Measure {
    Val(Vec<u32>),
    Top,
}

/// Solves by Jurdzinski-style small progress measures; returns winners only.
///
/// Measures are tuples indexed by the odd priorities in decreasing order;
/// the component for priority `p` is bounded by the number of positions of
/// priority `p`. Lifting at an odd-priority position strictly increases the
/// truncated measure, so a position can avoid the top element exactly when
/// `Even` can keep every odd priority from dominating — `Even` wins from a
/// position iff its least fixpoint measure is not top.
pub fn solve_progress_measures(game: &ParityGame) -> Vec<Player> {
    let n = game.num_positions();
    let mut odd_priorities: Vec<u32> =
        (0..n).map(|v| game.priority(v)).filter(|p| p % 2 == 1).collect();
    odd_priorities.sort_unstable_by(|a, b| b.cmp(a));
    odd_priorities.dedup();
    // slot of each odd priority in the measure tuple, and its bound.
    let slot = |p: u32| odd_priorities.iter().position(|&q| q == p).unwrap();
    let bound: Vec<u32> = odd_priorities
        .iter()
        .map(|&p| (0..n).filter(|&v| game.priority(v) == p).count() as u32)
        .collect();

    // Components with priority >= p: tuple slots 0..=slot(p') for the
    // smallest odd priority >= p.
    let significant = |p: u32| -> usize {
        odd_priorities.iter().take_while(|&&q| q >= p).count()
    };

    let prog = |measures: &[Measure], v: usize, w: usize| -> Measure {
        let m = match &measures[w] {
            Measure::Top => return Measure::Top,
            Measure::Val(m) => m,
        };
        let p = game.priority(v);
        let keep = significant(p);
        let mut out = vec![0; odd_priorities.len()];
        out[..keep].copy_from_slice(&m[..keep]);
        if p % 2 == 1 {
            // Strictly increase within the significant prefix, carrying
            // upward; running out of room means top.
            let mut i = slot(p);
            loop {
                if out[i] < bound[i] {
                    out[i] += 1;
                    break;
                }
                out[i] = 0;
                if i == 0 {
                    return Measure::Top;
                }
                i -= 1;
            }
        }
        Measure::Val(out)
    };

    fn measure_le(a: &Measure, b: &Measure) -> bool {
        match (a, b) {
            (_, Measure::Top) => true,
            (Measure::Top, Measure::Val(_)) => false,
            (Measure::Val(x), Measure::Val(y)) => x <= y,
        }
    }

    let mut measures = vec![Measure::Val(vec![0; odd_priorities.len()]); n];
    loop {
        let mut changed = false;
        for v in 0..n {
            if measures[v] == Measure::Top {
                continue;
            }
            let mut lifted: Option<Measure> = None;
            for &w in game.moves(v) {
                let candidate = prog(&measures, v, w);
                lifted = Some(match lifted {
                    None => candidate,
                    Some(current) => match game.owner(v) {
                        Player::Even if measure_le(&candidate, &current) => candidate,
                        Player::Odd if measure_le(&current, &candidate) => candidate,
                        _ => current,
                    },
                });
            }
            let lifted = lifted.expect("every position has a move");
            if !measure_le(&lifted, &measures[v]) {
                measures[v] = lifted;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    measures
        .into_iter()
        .map(|m| if m == Measure::Top { Player::Odd } else { Player::Even })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn game(owner: &[Player], priority: &[u32], moves: &[&[usize]]) -> ParityGame {
        ParityGame::new(
            owner.to_vec(),
            priority.to_vec(),
            moves.iter().map(|m| m.to_vec()).collect(),
        )
    }

    #[test]
    fn single_loops_go_to_the_priority_parity() {
        let g = game(&[Player::Even], &[2], &[&[0]]);
        assert_eq!(solve_recursive(&g).winner, vec![Player::Even]);
        assert_eq!(solve_progress_measures(&g), vec![Player::Even]);
        let g = game(&[Player::Even], &[3], &[&[0]]);
        assert_eq!(solve_recursive(&g).winner, vec![Player::Odd]);
        assert_eq!(solve_progress_measures(&g), vec![Player::Odd]);
    }

    #[test]
    fn chooser_escapes_to_the_good_loop() {
        // 0 chooses between an odd loop (1) and an even loop (2).
        let g = game(
            &[Player::Even, Player::Even, Player::Even],
            &[1, 1, 2],
            &[&[1, 2], &[1], &[2]],
        );
        let sol = solve_recursive(&g);
        assert_eq!(sol.winner, vec![Player::Even, Player::Odd, Player::Even]);
        assert_eq!(sol.strategy[0], Some(2));
        assert_eq!(
            solve_progress_measures(&g),
            vec![Player::Even, Player::Odd, Player::Even]
        );
    }

    #[test]
    fn adversary_forces_the_bad_loop() {
        // Same arena, but the chooser at 0 is the opponent.
        let g = game(
            &[Player::Odd, Player::Even, Player::Even],
            &[1, 1, 2],
            &[&[1, 2], &[1], &[2]],
        );
        let sol = solve_recursive(&g);
        assert_eq!(sol.winner, vec![Player::Odd, Player::Odd, Player::Even]);
        assert_eq!(sol.strategy[0], Some(1));
    }

    #[test]
    fn alternation_needs_the_higher_even_priority() {
        // A cycle seeing priorities 1 and 2 is even-dominated; adding a
        // detour through 3 flips it unless 4 is also on the cycle.
        let g = game(
            &[Player::Odd, Player::Even],
            &[1, 2],
            &[&[1], &[0]],
        );
        assert_eq!(solve_recursive(&g).winner, vec![Player::Even; 2]);
        let g = game(
            &[Player::Odd, Player::Even, Player::Even],
            &[1, 2, 3],
            &[&[1, 2], &[0], &[0]],
        );
        assert_eq!(solve_recursive(&g).winner, vec![Player::Odd; 3]);
        assert_eq!(solve_progress_measures(&g), vec![Player::Odd; 3]);
    }

    fn random_game(rng: &mut ChaCha8Rng) -> ParityGame {
        let n = rng.gen_range(1..=9);
        let owner = (0..n)
            .map(|_| if rng.gen_bool(0.5) { Player::Even } else { Player::Odd })
            .collect();
        let priority = (0..n).map(|_| rng.gen_range(0..=5)).collect();
        let moves = (0..n)
            .map(|_| {
                let k = rng.gen_range(1..=3usize);
                (0..k).map(|_| rng.gen_range(0..n)).collect()
            })
            .collect();
        ParityGame::new(owner, priority, moves)
    }

    /// Every cycle of `graph` restricted to priorities <= p that visits a
    /// priority-p position would witness an odd-dominated play.
    fn has_odd_dominated_cycle(game: &ParityGame, graph: &[Vec<usize>]) -> bool {
        let n = graph.len();
        let odd_ps: Vec<u32> =
            (0..n).map(|v| game.priority(v)).filter(|p| p % 2 == 1).collect();
        for &p in &odd_ps {
            let allowed: Vec<bool> = (0..n).map(|v| game.priority(v) <= p).collect();
            for start in (0..n).filter(|&v| game.priority(v) == p) {
                // Can `start` reach itself inside the allowed subgraph?
                let mut seen = vec![false; n];
                let mut stack: Vec<usize> = graph[start]
                    .iter()
                    .copied()
                    .filter(|&t| allowed[t])
                    .collect();
                let mut back = false;
                while let Some(v) = stack.pop() {
                    if v == start {
                        back = true;
                        break;
                    }
                    if seen[v] || !allowed[v] {
                        continue;
                    }
                    seen[v] = true;
                    stack.extend(graph[v].iter().copied().filter(|&t| allowed[t]));
                }
                if back {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn solvers_agree_on_random_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9a11ad);
        for round in 0..400 {
            let g = random_game(&mut rng);
            let rec = solve_recursive(&g);
            let spm = solve_progress_measures(&g);
            assert_eq!(rec.winner, spm, "round {round}: {g:?}");
        }
    }

    #[test]
    fn recursive_strategies_are_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x57a7e6);
        for round in 0..400 {
            let g = random_game(&mut rng);
            let sol = solve_recursive(&g);
            for player in [Player::Even, Player::Odd] {
                // Restrict to the player's region: owned positions follow the
                // strategy, opponent positions keep every move. All moves must
                // stay in the region, and no cycle may favor the opponent.
                let n = g.num_positions();
                let mut graph: Vec<Vec<usize>> = vec![Vec::new(); n];
                for v in 0..n {
                    if sol.winner[v] != player {
                        continue;
                    }
                    let targets: Vec<usize> = if g.owner(v) == player {
                        vec![sol.strategy[v].expect("winner-owned positions carry a move")]
                    } else {
                        g.moves(v).to_vec()
                    };
                    for t in targets {
                        assert_eq!(sol.winner[t], player, "round {round}: play escapes region");
                        graph[v].push(t);
                    }
                }
                let bad = match player {
                    Player::Even => has_odd_dominated_cycle(&g, &graph),
                    Player::Odd => {
                        // Dual check: flip parities by shifting priorities.
                        let flipped = ParityGame::new(
                            (0..n).map(|v| g.owner(v)).collect(),
                            (0..n).map(|v| g.priority(v) + 1).collect(),
                            (0..n).map(|v| g.moves(v).to_vec()).collect(),
                        );
                        has_odd_dominated_cycle(&flipped, &graph)
                    }
                };
                assert!(!bad, "round {round}: {player:?} strategy admits a losing cycle");
            }
        }
    }
}
