//! Small reference games used across the test suites and shipped as CLI
//! examples. All three are classics: a two-vertex negative cycle where Min
//! needs memory, a four-vertex game mixing a negative cycle with a positive
//! one, and a zero-weight cycle where a memoryless strategy is optimal.

use crate::game::GameGraph;
use crate::parse::parse_game;

/// Negative -1 cycle between the players; Max owns a -10 exit, Min a 0
/// exit. Values are -10 everywhere but no memoryless Min strategy achieves
/// them.
pub const FIG1_TEXT: &str = "\
max v_Max
min v_Min
target smiley
edge v_Min v_Max 0
edge v_Max v_Min -1
edge v_Max smiley -10
edge v_Min smiley 0
";

/// [`FIG1_TEXT`] without Min's own exit: Max keeps the play on the cycle
/// forever and both values are +inf.
pub const FIG1_NO_ESCAPE_TEXT: &str = "\
max v_Max
min v_Min
target smiley
edge v_Min v_Max 0
edge v_Max v_Min -1
edge v_Max smiley -10
";

/// [`FIG1_TEXT`] without Max's -10 exit: Min milks the -1 cycle without
/// bound and both values are -inf.
pub const FIG1_DROP_MAX_EXIT_TEXT: &str = "\
max v_Max
min v_Min
target smiley
edge v_Min v_Max 0
edge v_Max v_Min -1
edge v_Min smiley 0
";

/// Four-vertex game with a -1 cycle (v_0, v_1), a +3 cycle
/// (v_1, v_2, v_3) and exits of weight -10, -15 and 0.
pub const FIG2_TEXT: &str = "\
max v_0
min v_1
max v_2
min v_3
target smiley
edge v_1 v_0 0
edge v_0 v_1 -1
edge v_0 smiley -10
edge v_1 v_2 1
edge v_2 v_3 1
edge v_3 v_1 1
edge v_3 smiley 0
edge v_2 smiley -15
";

/// Two Min vertices on a zero-weight cycle with exits of weight 0 and -1;
/// the memoryless strategy v_0 -> v_1 -> smiley is optimal.
pub const FIG3_TEXT: &str = "\
min v_0
min v_1
target smiley
edge v_0 v_1 -1
edge v_1 v_0 1
edge v_0 smiley 0
edge v_1 smiley -1
";

pub fn fig1() -> GameGraph {
    parse_game(FIG1_TEXT).unwrap()
}

pub fn fig1_no_escape() -> GameGraph {
    parse_game(FIG1_NO_ESCAPE_TEXT).unwrap()
}

pub fn fig1_drop_max_exit() -> GameGraph {
    parse_game(FIG1_DROP_MAX_EXIT_TEXT).unwrap()
}

pub fn fig2() -> GameGraph {
    parse_game(FIG2_TEXT).unwrap()
}

pub fn fig3() -> GameGraph {
    parse_game(FIG3_TEXT).unwrap()
}
