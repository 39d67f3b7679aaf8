//! The mutation sequence from the Grassmannian-side collection to the quadric-side one.

use serde::{Deserialize, Serialize};

use super::axioms::AxiomTable;
use crate::mutation::{
    BlockToken, CollectionObject, Direction, Entry, ExcCollection, Move, MutationStep, Side,
};
use crate::sheaf::FilteredBundle;

/// Functor composition the block token must end with.
pub const THEOREM_FUNCTOR: &str = "L<O(H-2h), O(H-h)> ∘ R<O(h)> ∘ L<O(H), Ud(H)> ∘ j_* ∘ q^*";

/// Explicit objects the final collection must consist of, in order.
pub const FINAL_OBJECTS: [&str; 6] = ["O(-3h)", "O(-2h)", "O(-h)", "Sprime", "O", "O(h)"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofScript {
    pub initial: ExcCollection,
    pub steps: Vec<MutationStep>,
    /// Functor string the block must carry at the end, compared modulo whitespace.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_functor: Option<String>,
    /// Whether to run the final identification of the rank 4 object.
    #[serde(default)]
    pub identify_final: bool,
    #[serde(default)]
    pub axioms: AxiomTable,
}

impl ProofScript {
    /// Same initial collection, no moves, no expectations.
    pub fn empty() -> Self {
        ProofScript {
            initial: initial_collection(),
            steps: Vec::new(),
            expected_functor: None,
            identify_final: false,
            axioms: AxiomTable::default(),
        }
    }

    pub fn step(&self, id: &str) -> Option<(usize, &MutationStep)> {
        self.steps.iter().enumerate().find(|(_, s)| s.id == id)
    }

    /// Replaces the declared result of the first right mutation; used for negative controls.
    pub fn with_first_right_declared(&self, declared: FilteredBundle) -> Self {
        let mut out = self.clone();
        for step in &mut out.steps {
            for mv in &mut step.moves {
                if let Move::RightMutation { declared: d, .. } = mv {
                    *d = declared;
                    return out;
                }
            }
        }
        out
    }
}

fn obj(src: &str) -> Entry {
    Entry::Object(CollectionObject::given(
        FilteredBundle::parse(src).expect("built-in expression"),
    ))
}

fn names(list: &[&str]) -> Option<Vec<String>> {
    Some(list.iter().map(|s| s.to_string()).collect())
}

pub fn initial_collection() -> ExcCollection {
    ExcCollection::new(vec![
        obj("O(-H)"),
        obj("U"),
        obj("O"),
        obj("Ud"),
        obj("O(H)"),
        obj("Ud(H)"),
        Entry::Block(BlockToken::new("Φ0(D(Y))", "j_* ∘ q^*")),
    ])
}

fn step(id: &str, quote: &str, moves: Vec<Move>, after: &[&str]) -> MutationStep {
    MutationStep {
        id: id.into(),
        quote: quote.into(),
        moves,
        expected_after: names(after),
    }
}

fn bundle(src: &str) -> FilteredBundle {
    FilteredBundle::parse(src).expect("built-in expression")
}

/// The ten move records.
pub fn paper_script() -> ProofScript {
    use Direction::{Left, Right};
    let steps = vec![
        step(
            "move-01",
            "block Φ0 moves two places left, past O(H) and Ud(H)",
            vec![Move::BlockMutation {
                block: 6,
                direction: Left,
                steps: 2,
                new_label: "Φ1(D(Y))".into(),
            }],
            &["O(-H)", "U", "O", "Ud", "Φ1(D(Y))", "O(H)", "Ud(H)"],
        ),
        step(
            "move-02",
            "last two objects go to the far left, twisted by K_M",
            vec![Move::SerreMove {
                indices: vec![5, 6],
                to: Side::FarLeft,
            }],
            &["O(-h)", "Ud(-h)", "O(-H)", "U", "O", "Ud", "Φ1(D(Y))"],
        ),
        step(
            "move-03",
            "O(-h) and Ud(-h) move one place right, past O(-H)",
            vec![
                Move::Commute {
                    mover: 1,
                    direction: Right,
                },
                Move::Commute {
                    mover: 0,
                    direction: Right,
                },
            ],
            &["O(-H)", "O(-h)", "Ud(-h)", "U", "O", "Ud", "Φ1(D(Y))"],
        ),
        step(
            "move-04",
            "U moves one place left; the mutation is the extension Sprime",
            vec![Move::LeftMutation {
                target: 3,
                declared: bundle("Sprime"),
            }],
            &["O(-H)", "O(-h)", "Sprime", "Ud(-h)", "O", "Ud", "Φ1(D(Y))"],
        ),
        step(
            "move-05",
            "O(-H) goes to the far right, twisted by -K_M",
            vec![Move::SerreMove {
                indices: vec![0],
                to: Side::FarRight,
            }],
            &["O(-h)", "Sprime", "Ud(-h)", "O", "Ud", "Φ1(D(Y))", "O(h)"],
        ),
        step(
            "move-06",
            "block Φ1 moves one place right, past O(h)",
            vec![Move::BlockMutation {
                block: 5,
                direction: Right,
                steps: 1,
                new_label: "Φ2(D(Y))".into(),
            }],
            &["O(-h)", "Sprime", "Ud(-h)", "O", "Ud", "O(h)", "Φ2(D(Y))"],
        ),
        step(
            "move-07",
            "Ud(-h) and Ud move one place right; the mutations are cones",
            vec![
                Move::RightMutation {
                    target: 2,
                    declared: bundle("O(H-2h)"),
                    sigma: 1,
                },
                Move::RightMutation {
                    target: 4,
                    declared: bundle("O(H-h)"),
                    sigma: 1,
                },
            ],
            &[
                "O(-h)",
                "Sprime",
                "O",
                "O(H-2h)",
                "O(h)",
                "O(H-h)",
                "Φ2(D(Y))",
            ],
        ),
        step(
            "move-08",
            "O(h) moves one place left, past O(H-2h)",
            vec![Move::Commute {
                mover: 4,
                direction: Left,
            }],
            &[
                "O(-h)",
                "Sprime",
                "O",
                "O(h)",
                "O(H-2h)",
                "O(H-h)",
                "Φ2(D(Y))",
            ],
        ),
        step(
            "move-09",
            "block Φ2 moves two places left, past O(H-2h) and O(H-h)",
            vec![Move::BlockMutation {
                block: 6,
                direction: Left,
                steps: 2,
                new_label: "Φ3(D(Y))".into(),
            }],
            &[
                "O(-h)",
                "Sprime",
                "O",
                "O(h)",
                "Φ3(D(Y))",
                "O(H-2h)",
                "O(H-h)",
            ],
        ),
        step(
            "move-10",
            "O(H-2h) and O(H-h) go to the far left, twisted by K_M",
            vec![Move::SerreMove {
                indices: vec![5, 6],
                to: Side::FarLeft,
            }],
            &[
                "O(-3h)",
                "O(-2h)",
                "O(-h)",
                "Sprime",
                "O",
                "O(h)",
                "Φ3(D(Y))",
            ],
        ),
    ];
    ProofScript {
        initial: initial_collection(),
        steps,
        expected_functor: Some(THEOREM_FUNCTOR.to_string()),
        identify_final: true,
        axioms: AxiomTable::default(),
    }
}

/// Objects of the final collection as fresh line-bundle and built-in models.
pub fn final_models() -> Vec<FilteredBundle> {
    FINAL_OBJECTS.iter().map(|s| bundle(s)).collect()
}

pub(crate) fn squash_ws(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        let s = paper_script();
        assert_eq!(s.steps.len(), 10);
        let init: Vec<_> = s.initial.objects().iter().map(|o| o.name()).collect();
        assert_eq!(init, ["O(-H)", "U", "O", "Ud", "O(H)", "Ud(H)"]);
        let last = s.steps.last().unwrap().expected_after.as_ref().unwrap();
        assert_eq!(&last[..6], &FINAL_OBJECTS);
    }

    #[test]
    fn json_round_trip() {
        let s = paper_script();
        let text = serde_json::to_string(&s).unwrap();
        let back: ProofScript = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn whitespace_squash() {
        assert_eq!(squash_ws(" a ∘ b\n"), "a∘b");
    }
}
