use std::fmt;

/// Hidden state of a data point: background (0) or peak (1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Background = 0,
    Peak = 1,
}

impl State {
    pub const ALL: [State; 2] = [State::Background, State::Peak];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn other(self) -> Self {
        match self {
            State::Background => State::Peak,
            State::Peak => State::Background,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            State::Background => "background",
            State::Peak => "peak",
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
