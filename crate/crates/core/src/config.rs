//! Run configuration (under construction).
