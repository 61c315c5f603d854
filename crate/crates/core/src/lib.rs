//! Capacity-feasible, agent-based dynamic assignment for timetabled public
//! transit: passengers route by perceived travel time, make stochastic
//! choices, experience crowding, denied boardings and dwell delays, learn from
//! day to day and react to real-time conditions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::field_reassign_with_default))]

pub mod choice;
pub mod congestion;
pub mod demand;
pub mod experiments;
pub mod io;
pub mod learning;
pub mod network;
pub mod ptt;
pub mod realtime;
pub mod rng;
pub mod sim;
pub mod synthetic;
