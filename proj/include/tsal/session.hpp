#pragma once

#include <string>
#include <variant>
#include <vector>

#include "tsal/foveation.hpp"

namespace tsal::session {

// Click-budget protocol. Defaults: 10 s at 25 fps, five rounds, 4 s of
// deblurring per round, at most 1 s per continuous press.
struct ProtocolParams {
  int fps = 25;
  int duration_frames = 250;
  int rounds = 5;
  int round_budget_frames = 100;
  int click_cap_frames = 25;

  friend bool operator==(const ProtocolParams&, const ProtocolParams&) = default;
};

// Throws Error(InvalidConfig) unless fps, duration and rounds are positive,
// 0 <= cap <= budget <= duration, and cap > 0 whenever budget > 0.
void validate(const ProtocolParams& p);

// One displayed frame. `hold` is the 1-based ordinal of the button press
// active during this tick within the round, 0 while the button is up.
struct FrameEvent {
  int frame_index = 0;
  double cursor_x = 0.0;
  double cursor_y = 0.0;
  bool deblurred = false;
  int hold = 0;

  friend bool operator==(const FrameEvent&, const FrameEvent&) = default;
};

using RoundLog = std::vector<FrameEvent>;

struct SessionLog {
  std::string observer_id;
  std::string video_id;
  std::string config_hash;
  std::vector<RoundLog> rounds;

  friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

struct CursorMove {
  double x = 0.0;
  double y = 0.0;
};
struct Press {};
struct Release {};
struct FrameTick {};
using InputEvent = std::variant<CursorMove, Press, Release, FrameTick>;

struct ShowBlurred {
  friend bool operator==(const ShowBlurred&, const ShowBlurred&) = default;
};
struct ShowWindow {
  foveation::Point center;
  double radius_px = 0.0;
};
using DisplayEffect = std::variant<ShowBlurred, ShowWindow>;

struct SessionState {
  ProtocolParams params;
  double window_radius_px = 200.0;
  int round_index = 0;
  int frame_index = 0;
  int budget_remaining = 0;
  int click_remaining = 0;
  bool button_down = false;
  int hold_ordinal = 0;
  bool finished = false;
  foveation::Point cursor;
  // Effect of the most recent tick; pointer moves between ticks move the window.
  bool showing_window = false;
  SessionLog log;
};

struct SessionOptions {
  std::string config_hash;
  double window_radius_px = 200.0;
};

SessionState new_session(const ProtocolParams& p, std::string observer_id, std::string video_id,
                         const SessionOptions& options = {});

struct Transition {
  SessionState state;
  DisplayEffect effect;
};

// Pure transition. Press arms a fresh per-click allowance; a FrameTick
// deblurs iff the button is down and both the round budget and the click
// allowance are positive. A hold never survives a round boundary.
// Throws Error(SessionFinished) once every round has been played.
Transition handle_event(SessionState state, const InputEvent& event);

// Feeds a sequence of events through handle_event from a fresh session.
SessionLog replay(const ProtocolParams& p, const std::vector<InputEvent>& events,
                  const std::string& observer_id = "replay", const std::string& video_id = "video");

enum class ViolationKind {
  RoundCount,
  FrameSequence,
  BudgetExceeded,
  ClickCapExceeded,
  HoldSequence,
  InvalidCursor,
  Metadata,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int round = -1;  // 0-based, -1 when not tied to a round
  int frame = -1;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool accepted() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

// Checks a single round's events against the protocol.
std::vector<Violation> validate_round(const RoundLog& events, int round_index,
                                      const ProtocolParams& p);

// A log is accepted iff it has exactly p.rounds rounds and every round passes
// validate_round.
ValidationReport validate_log(const SessionLog& log, const ProtocolParams& p);

}  // namespace tsal::session
