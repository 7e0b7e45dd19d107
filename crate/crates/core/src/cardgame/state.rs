use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::actions::{Action, ActionLayout, ActionMask, AttackTarget, PlayTarget};
use super::cards::{Card, CardId, CardKind, CardSet, SpellEffect};
use super::config::{CbMode, GameConfig, LANE_CAPACITY};
use crate::efg::Player;
use crate::error::{Error, Result};

/// Everything fixed by the config: pool, arena candidates, action layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Rules {
    pub config: GameConfig,
    pub cards: CardSet,
    pub layout: ActionLayout,
}

impl Rules {
    pub fn new(config: GameConfig) -> Result<Arc<Self>> {
        config.validate()?;
        Ok(Arc::new(Self {
            cards: CardSet::generate(&config),
            layout: ActionLayout::new(&config),
            config,
        }))
    }

    pub fn card(&self, id: CardId) -> &Card {
        &self.cards.pool[id]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    /// Card-deck building.
    Cb,
    /// Battle.
    Bt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Creature {
    pub card: CardId,
    pub attack: i32,
    pub health: i32,
    /// Has not attacked yet this turn.
    pub ready: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Side {
    /// Remaining deck, kept sorted; draws pick a uniform remaining card.
    pub deck: Vec<CardId>,
    /// Kept sorted so identical cards are adjacent.
    pub hand: Vec<CardId>,
    pub board: Vec<Vec<Creature>>,
    pub graveyard: Vec<CardId>,
    pub hp: i32,
    pub mana: u32,
    /// CB picks made so far.
    pub picks: Vec<CardId>,
}

impl Side {
    fn new(config: &GameConfig) -> Self {
        Self {
            deck: Vec::new(),
            hand: Vec::new(),
            board: vec![Vec::new(); config.lanes],
            graveyard: Vec::new(),
            hp: config.initial_hp,
            mana: 0,
            picks: Vec::new(),
        }
    }

    /// All owned cards across zones, sorted.
    pub fn card_multiset(&self) -> Vec<CardId> {
        let mut v: Vec<CardId> = self
            .deck
            .iter()
            .chain(&self.hand)
            .chain(&self.graveyard)
            .copied()
            .chain(self.board.iter().flatten().map(|c| c.card))
            .collect();
        v.sort_unstable();
        v
    }
}

fn insert_sorted(v: &mut Vec<CardId>, c: CardId) {
    let pos = v.partition_point(|&x| x <= c);
    v.insert(pos, c);
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv_mix(mut h: u64, words: &[u64]) -> u64 {
    for w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// Result of one `step`: `reward` is player 1's terminal reward, 0 before
/// the end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub terminal: bool,
    pub reward: f64,
}

/// Full world state of one game.
#[derive(Debug, Clone)]
pub struct CardGameState {
    rules: Arc<Rules>,
    stage: Stage,
    sides: [Side; 2],
    to_act: Player,
    /// BT player-turns started so far.
    turn: u32,
    /// Draws still owed to the side to act.
    pending_draws: usize,
    outcome: Option<f64>,
    /// Running hash of each player's observation history.
    info_hash: [u64; 2],
    rng: ChaCha8Rng,
}

impl PartialEq for CardGameState {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
            && self.stage == other.stage
            && self.sides == other.sides
            && self.to_act == other.to_act
            && self.turn == other.turn
            && self.pending_draws == other.pending_draws
            && self.outcome == other.outcome
            && self.info_hash == other.info_hash
            && self.rng == other.rng
    }
}

impl CardGameState {
    /// New game in CB stage; the draw stream is seeded from `rng_seed`.
    pub fn new(config: GameConfig) -> Result<Self> {
        let seed = config.rng_seed;
        Self::with_deal(Rules::new(config)?, seed)
    }

    /// New game sharing `rules`, with draws seeded by `deal_seed`.
    pub fn with_deal(rules: Arc<Rules>, deal_seed: u64) -> Result<Self> {
        let sides = [Side::new(&rules.config), Side::new(&rules.config)];
        Ok(Self {
            stage: Stage::Cb,
            sides,
            to_act: Player::P1,
            turn: 0,
            pending_draws: 0,
            outcome: None,
            info_hash: [fnv_mix(FNV_OFFSET, &[1]), fnv_mix(FNV_OFFSET, &[2])],
            rng: ChaCha8Rng::seed_from_u64(deal_seed),
            rules,
        })
    }

    pub fn rules(&self) -> &Arc<Rules> {
        &self.rules
    }

    pub fn config(&self) -> &GameConfig {
        &self.rules.config
    }

    pub fn layout(&self) -> &ActionLayout {
        &self.rules.layout
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn side(&self, p: Player) -> &Side {
        &self.sides[p.index()]
    }

    pub fn turn(&self) -> u32 {
        self.turn
    }

    /// BT round, 1-based; 0 during CB.
    pub fn round(&self) -> u32 {
        self.turn.div_ceil(2)
    }

    pub fn is_terminal(&self) -> bool {
        self.outcome.is_some()
    }

    /// Player 1's reward once the game is over.
    pub fn outcome(&self) -> Option<f64> {
        self.outcome
    }

    /// The player to act, or `None` when terminal.
    pub fn to_act(&self) -> Option<Player> {
        (!self.is_terminal()).then_some(self.to_act)
    }

    /// True when a draw must be resolved before the next decision.
    pub fn is_chance(&self) -> bool {
        !self.is_terminal() && self.pending_draws > 0
    }

    pub(crate) fn info_hash(&self, p: Player) -> u64 {
        self.info_hash[p.index()]
    }

    /// Current CB offer in arena mode.
    pub fn cb_candidates(&self, p: Player) -> &[CardId] {
        if self.stage != Stage::Cb || self.config().cb_mode != CbMode::Arena {
            return &[];
        }
        let round = self.sides[p.index()].picks.len();
        self.rules.cards.candidates.get(round).map_or(&[], |c| c)
    }

    fn log_private(&mut self, p: Player, words: &[u64]) {
        self.info_hash[p.index()] = fnv_mix(self.info_hash[p.index()], words);
    }

    fn log_public(&mut self, words: &[u64]) {
        for p in Player::BOTH {
            self.log_private(p, words);
        }
    }

    fn can_draw(&self) -> bool {
        let s = &self.sides[self.to_act.index()];
        s.hand.len() < self.config().hand_limit && !s.deck.is_empty()
    }

    fn settle_draws(&mut self) {
        if self.pending_draws > 0 && !self.can_draw() {
            self.pending_draws = 0;
        }
    }

    /// Distinct cards the pending draw can produce, with probabilities.
    pub fn draw_outcomes(&self) -> Vec<(CardId, f64)> {
        if !self.is_chance() {
            return Vec::new();
        }
        let deck = &self.sides[self.to_act.index()].deck;
        let n = deck.len() as f64;
        let mut out: Vec<(CardId, f64)> = Vec::new();
        for &c in deck {
            match out.last_mut() {
                Some((last, w)) if *last == c => *w += 1.0,
                _ => out.push((c, 1.0)),
            }
        }
        for (_, w) in &mut out {
            *w /= n;
        }
        out
    }

    /// Resolves the pending draw with a specific card.
    pub fn apply_draw(&mut self, card: CardId) -> Result<()> {
        if !self.is_chance() {
            return Err(Error::ContractViolation("no draw is pending".into()));
        }
        let p = self.to_act;
        let side = &mut self.sides[p.index()];
        let pos = side.deck.iter().position(|&c| c == card).ok_or_else(|| {
            Error::ContractViolation(format!("card {card} is not in {p}'s deck"))
        })?;
        side.deck.remove(pos);
        insert_sorted(&mut side.hand, card);
        self.log_private(p, &[2, card as u64]);
        self.pending_draws -= 1;
        self.settle_draws();
        Ok(())
    }

    /// Resolves every pending draw from `rng`.
    pub fn resolve_chance_with<R: Rng>(&mut self, rng: &mut R) {
        while self.is_chance() {
            let deck = &self.sides[self.to_act.index()].deck;
            let card = deck[rng.random_range(0..deck.len())];
            self.apply_draw(card).expect("drawn card is in the deck");
        }
    }

    /// Resolves every pending draw from the state's own stream.
    pub fn resolve_chance(&mut self) {
        let mut rng = self.rng.clone();
        self.resolve_chance_with(&mut rng);
        self.rng = rng;
    }

    /// Legal actions of `player`, who must be the side to act at a decision.
    pub fn legal_actions(&self, player: Player) -> Result<ActionMask> {
        if self.is_terminal() {
            return Err(Error::ContractViolation("game is over".into()));
        }
        if self.is_chance() {
            return Err(Error::ContractViolation("a draw is pending".into()));
        }
        if player != self.to_act {
            return Err(Error::ContractViolation(format!(
                "{player} queried legal actions on {}'s turn",
                self.to_act
            )));
        }
        Ok(self.mask())
    }

    /// Mask of the side to act at a decision point.
    pub fn mask(&self) -> ActionMask {
        let layout = *self.layout();
        let mut m = ActionMask::none(layout.size());
        if self.is_terminal() || self.is_chance() {
            return m;
        }
        let me = &self.sides[self.to_act.index()];
        let opp = &self.sides[self.to_act.opponent().index()];
        if self.stage == Stage::Cb {
            match self.config().cb_mode {
                CbMode::Arena => {
                    for i in 0..self.cb_candidates(self.to_act).len() {
                        m.0[i] = true;
                    }
                }
                CbMode::Constructed => {
                    for id in 0..self.config().pool_size {
                        m.0[id] = !me.picks.contains(&id);
                    }
                }
            }
            return m;
        }
        let lanes = self.config().lanes;
        for (slot, &card_id) in me.hand.iter().enumerate() {
            if slot > 0 && me.hand[slot - 1] == card_id {
                continue;
            }
            let card = self.rules.card(card_id);
            if card.cost > me.mana {
                continue;
            }
            let mut allow = |target| m.0[layout.encode(Action::Play { hand_slot: slot, target })] = true;
            match card.kind {
                CardKind::Creature { .. } => {
                    for l in 0..lanes {
                        if me.board[l].len() < LANE_CAPACITY {
                            allow(PlayTarget::Lane(l));
                        }
                    }
                }
                CardKind::Spell { effect, .. } => match effect {
                    SpellEffect::DamageFace => allow(PlayTarget::Face),
                    SpellEffect::DamageCreature => {
                        for (lane, row) in opp.board.iter().enumerate() {
                            for slot in 0..row.len() {
                                allow(PlayTarget::Enemy { lane, slot });
                            }
                        }
                    }
                    SpellEffect::BuffAttack => {
                        for (lane, row) in me.board.iter().enumerate() {
                            for slot in 0..row.len() {
                                allow(PlayTarget::Ally { lane, slot });
                            }
                        }
                    }
                },
            }
        }
        for (lane, row) in me.board.iter().enumerate() {
            for (slot, c) in row.iter().enumerate() {
                if !c.ready || c.attack < 1 {
                    continue;
                }
                let mut allow = |target| m.0[layout.encode(Action::Attack { lane, slot, target })] = true;
                if opp.board[lane].is_empty() {
                    allow(AttackTarget::Face);
                } else {
                    for s in 0..opp.board[lane].len() {
                        allow(AttackTarget::Slot(s));
                    }
                }
            }
        }
        m.0[layout.end_turn_id()] = true;
        m
    }

    /// Applies a decision without resolving the draws it triggers. The state
    /// is left unchanged when the action is illegal.
    pub fn apply_decision(&mut self, action_id: usize) -> Result<()> {
        if self.is_terminal() || self.is_chance() {
            return Err(Error::IllegalAction {
                action: action_id,
                reason: "not at a decision point".into(),
            });
        }
        if !self.mask().is_legal(action_id) {
            return Err(Error::IllegalAction {
                action: action_id,
                reason: "masked out in this state".into(),
            });
        }
        let action = self.layout().decode(action_id)?;
        match action {
            Action::Pick(i) => self.pick(i),
            Action::Play { hand_slot, target } => self.play(hand_slot, target),
            Action::Attack { lane, slot, target } => self.attack(lane, slot, target),
            Action::EndTurn => self.end_turn(),
        }
        Ok(())
    }

    /// Applies a decision and resolves the resulting draws from the state's
    /// own stream. Unchanged on error.
    pub fn apply(&mut self, action_id: usize) -> Result<StepOutcome> {
        self.apply_decision(action_id)?;
        self.resolve_chance();
        Ok(StepOutcome {
            terminal: self.is_terminal(),
            reward: self.outcome.unwrap_or(0.0),
        })
    }

    /// Functional form of [`CardGameState::apply`].
    pub fn step(&self, action_id: usize) -> Result<(CardGameState, StepOutcome)> {
        let mut next = self.clone();
        let out = next.apply(action_id)?;
        Ok((next, out))
    }

    fn pick(&mut self, i: usize) {
        let p = self.to_act;
        let card = match self.config().cb_mode {
            CbMode::Arena => self.cb_candidates(p)[i],
            CbMode::Constructed => i,
        };
        let side = &mut self.sides[p.index()];
        side.picks.push(card);
        insert_sorted(&mut side.deck, card);
        self.log_private(p, &[1, card as u64]);
        let deck_size = self.config().deck_size;
        if p == Player::P2 && self.sides[1].picks.len() == deck_size {
            self.stage = Stage::Bt;
            self.to_act = Player::P1;
            self.begin_turn();
        } else {
            self.to_act = p.opponent();
        }
    }

    fn begin_turn(&mut self) {
        self.turn += 1;
        let mana = self.round().min(self.config().max_mana);
        let side = &mut self.sides[self.to_act.index()];
        side.mana = mana;
        for c in side.board.iter_mut().flatten() {
            c.ready = true;
        }
        self.pending_draws = self.config().draw_per_turn;
        self.settle_draws();
    }

    fn play(&mut self, hand_slot: usize, target: PlayTarget) {
        let p = self.to_act;
        let card_id = self.sides[p.index()].hand.remove(hand_slot);
        let card = *self.rules.card(card_id);
        let (me, opp) = self.split_mut(p);
        me.mana -= card.cost;
        let target_word;
        match (card.kind, target) {
            (CardKind::Creature { attack, health }, PlayTarget::Lane(l)) => {
                me.board[l].push(Creature {
                    card: card_id,
                    attack,
                    health,
                    ready: true,
                });
                target_word = l as u64;
            }
            (CardKind::Spell { magnitude, .. }, PlayTarget::Face) => {
                opp.hp -= magnitude;
                me.graveyard.push(card_id);
                target_word = 100;
            }
            (CardKind::Spell { magnitude, .. }, PlayTarget::Enemy { lane, slot }) => {
                let c = &mut opp.board[lane][slot];
                c.health -= magnitude;
                if c.health <= 0 {
                    let dead = opp.board[lane].remove(slot);
                    opp.graveyard.push(dead.card);
                }
                me.graveyard.push(card_id);
                target_word = 200 + (lane * LANE_CAPACITY + slot) as u64;
            }
            (CardKind::Spell { magnitude, .. }, PlayTarget::Ally { lane, slot }) => {
                me.board[lane][slot].attack += magnitude;
                me.graveyard.push(card_id);
                target_word = 300 + (lane * LANE_CAPACITY + slot) as u64;
            }
            _ => unreachable!("mask only admits matching card and target kinds"),
        }
        self.log_public(&[3, p.number() as u64, card_id as u64, target_word]);
        self.check_lethal(p);
    }

    fn attack(&mut self, lane: usize, slot: usize, target: AttackTarget) {
        let p = self.to_act;
        let (me, opp) = self.split_mut(p);
        let atk = {
            let c = &mut me.board[lane][slot];
            c.ready = false;
            c.attack
        };
        let target_word = match target {
            AttackTarget::Face => {
                opp.hp -= atk;
                100
            }
            AttackTarget::Slot(s) => {
                let def_atk = opp.board[lane][s].attack;
                opp.board[lane][s].health -= atk;
                me.board[lane][slot].health -= def_atk;
                if opp.board[lane][s].health <= 0 {
                    let dead = opp.board[lane].remove(s);
                    opp.graveyard.push(dead.card);
                }
                if me.board[lane][slot].health <= 0 {
                    let dead = me.board[lane].remove(slot);
                    me.graveyard.push(dead.card);
                }
                s as u64
            }
        };
        self.log_public(&[4, p.number() as u64, lane as u64, slot as u64, target_word]);
        self.check_lethal(p);
    }

    fn end_turn(&mut self) {
        let p = self.to_act;
        self.log_public(&[5, p.number() as u64]);
        if p == Player::P2 && self.round() >= self.config().max_turns {
            let [a, b] = [self.sides[0].hp, self.sides[1].hp];
            self.outcome = Some(match a.cmp(&b) {
                std::cmp::Ordering::Greater => 1.0,
                std::cmp::Ordering::Less => -1.0,
                std::cmp::Ordering::Equal => 0.0,
            });
            return;
        }
        self.to_act = p.opponent();
        self.begin_turn();
    }

    fn check_lethal(&mut self, actor: Player) {
        if self.sides[actor.opponent().index()].hp <= 0 {
            self.outcome = Some(actor.sign());
        }
    }

    fn split_mut(&mut self, p: Player) -> (&mut Side, &mut Side) {
        let [a, b] = &mut self.sides;
        match p {
            Player::P1 => (a, b),
            Player::P2 => (b, a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> GameConfig {
        GameConfig {
            pool_size: 6,
            deck_size: 2,
            cb_mode: CbMode::Constructed,
            candidates_per_round: 2,
            lanes: 2,
            initial_hp: 5,
            max_mana: 3,
            hand_limit: 3,
            max_turns: 3,
            draw_per_turn: 0,
            rng_seed: 1,
        }
    }

    /// A BT state on P1's first turn with empty hands and boards.
    fn battle(config: GameConfig) -> CardGameState {
        let mut h = CardGameState::new(config).unwrap();
        while h.stage() == Stage::Cb {
            let a = h.mask().legal()[0];
            h.apply(a).unwrap();
        }
        for s in &mut h.sides {
            s.deck.clear();
            s.hand.clear();
        }
        h
    }

    fn with_card(h: &mut CardGameState, cost: u32, kind: CardKind) -> CardId {
        let mut rules = (**h.rules()).clone();
        let id = rules.cards.pool.len();
        rules.cards.pool.push(Card { id, cost, kind });
        h.rules = Arc::new(rules);
        id
    }

    fn creature(card: CardId, attack: i32, health: i32) -> Creature {
        Creature {
            card,
            attack,
            health,
            ready: true,
        }
    }

    #[test]
    fn expensive_hand_only_allows_end_turn() {
        let mut h = battle(config());
        let c = with_card(&mut h, 3, CardKind::Creature { attack: 2, health: 2 });
        h.sides[0].hand = vec![c, c];
        assert_eq!(h.mana_of(Player::P1), 1);
        assert_eq!(h.mask().legal(), vec![h.layout().end_turn_id()]);
    }

    #[test]
    fn empty_lane_exposes_face() {
        let mut h = battle(config());
        h.sides[0].board[0].push(creature(0, 2, 2));
        h.sides[1].board[1].push(creature(1, 1, 1));
        let layout = *h.layout();
        let face = layout.encode(Action::Attack { lane: 0, slot: 0, target: AttackTarget::Face });
        assert!(h.mask().is_legal(face));
        h.sides[0].board[1].push(creature(0, 2, 2));
        let blocked = layout.encode(Action::Attack { lane: 1, slot: 0, target: AttackTarget::Face });
        let hit = layout.encode(Action::Attack { lane: 1, slot: 0, target: AttackTarget::Slot(0) });
        assert!(!h.mask().is_legal(blocked));
        assert!(h.mask().is_legal(hit));
    }

    #[test]
    fn lethal_face_attack_ends_the_game() {
        for actor in Player::BOTH {
            let mut h = battle(config());
            if actor == Player::P2 {
                h.apply(h.layout().end_turn_id()).unwrap();
            }
            h.sides[actor.index()].board[0].push(creature(0, 5, 1));
            let a = h.layout().encode(Action::Attack { lane: 0, slot: 0, target: AttackTarget::Face });
            let (next, out) = h.step(a).unwrap();
            assert!(out.terminal);
            assert_eq!(out.reward, actor.sign());
            assert_eq!(next.side(actor.opponent()).hp, 0);
        }
    }

    #[test]
    fn passing_to_the_turn_limit_is_a_draw() {
        let mut h = battle(config());
        let mut steps = 0;
        while !h.is_terminal() {
            let out = h.apply(h.layout().end_turn_id()).unwrap();
            steps += 1;
            if out.terminal {
                assert_eq!(out.reward, 0.0);
            }
        }
        assert_eq!(steps, 2 * 3);
    }

    #[test]
    fn simultaneous_combat_kills_both() {
        let mut h = battle(config());
        h.sides[0].board[0].push(creature(0, 3, 2));
        h.sides[1].board[0].push(creature(1, 2, 3));
        let a = h.layout().encode(Action::Attack { lane: 0, slot: 0, target: AttackTarget::Slot(0) });
        h.apply(a).unwrap();
        assert!(h.sides[0].board[0].is_empty());
        assert!(h.sides[1].board[0].is_empty());
        assert_eq!(h.sides[0].graveyard, vec![0]);
        assert_eq!(h.sides[1].graveyard, vec![1]);
    }

    #[test]
    fn creature_attacks_once_per_turn() {
        let mut h = battle(config());
        h.sides[0].board[0].push(creature(0, 1, 1));
        let a = h.layout().encode(Action::Attack { lane: 0, slot: 0, target: AttackTarget::Face });
        h.apply(a).unwrap();
        assert!(h.apply(a).is_err());
    }

    #[test]
    fn spells_resolve() {
        let mut h = battle(config());
        let bolt = with_card(&mut h, 1, CardKind::Spell { effect: SpellEffect::DamageCreature, magnitude: 2 });
        h.sides[0].hand = vec![bolt];
        h.sides[1].board[1].push(creature(0, 1, 2));
        let a = h.layout().encode(Action::Play {
            hand_slot: 0,
            target: PlayTarget::Enemy { lane: 1, slot: 0 },
        });
        h.apply(a).unwrap();
        assert!(h.sides[1].board[1].is_empty());
        assert_eq!(h.sides[0].mana, 0);
        assert_eq!(h.sides[0].graveyard, vec![bolt]);
    }

    #[test]
    fn illegal_action_leaves_state_unchanged() {
        let h = battle(config());
        let mut g = h.clone();
        assert!(g.apply(0).is_err());
        assert!(g.apply(g.layout().size()).is_err());
        assert_eq!(g, h);
    }

    #[test]
    fn only_first_copy_of_a_card_is_playable() {
        let mut h = battle(config());
        let c = with_card(&mut h, 1, CardKind::Creature { attack: 1, health: 1 });
        h.sides[0].hand = vec![c, c];
        let first = h.layout().encode(Action::Play { hand_slot: 0, target: PlayTarget::Lane(0) });
        let second = h.layout().encode(Action::Play { hand_slot: 1, target: PlayTarget::Lane(0) });
        let m = h.mask();
        assert!(m.is_legal(first) && !m.is_legal(second));
    }

    impl CardGameState {
        fn mana_of(&self, p: Player) -> u32 {
            self.sides[p.index()].mana
        }
    }
}
