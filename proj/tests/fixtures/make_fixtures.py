#!/usr/bin/env python3
"""Regenerates the bundled fixture corpora (deterministic).

The train split leans on a few high-frequency skeleton shapes so that pair
merging produces large units, while the test split reorders or recombines
children of known labels. Those lines stay coverable by sampled placeholder
patterns but not by the patterns a single best-path tokenization emits, plus
a couple of lines with labels the train split never contains at all.
"""

import random

rng = random.Random(20240817)

WORDS = {
    "loc": ["boston", "on elm street", "downtown", "the office", "school", "seattle"],
    "time": ["tomorrow", "at 5 pm", "tonight", "next monday", "in an hour", "this weekend"],
    "todo": ["call mom", "send the report", "buy milk", "water the plants", "pay rent"],
    "person": ["me", "us", "the team"],
    "artist": ["the beatles", "miles davis", "taylor swift"],
    "track": ["yesterday", "so what"],
    "event": ["the concert", "the game", "jazz night"],
    "contact": ["grandma", "alex"],
    "name": ["work alarm", "nap timer"],
    "recipient": ["john", "sarah"],
    "content": ["i am late", "see you soon"],
    "attr": ["rain", "snow", "wind"],
}


def w(kind):
    return rng.choice(WORDS[kind])


# (weight, template) pairs; {x} placeholders are filled with word classes.
TRAIN_TEMPLATES = [
    (28, lambda: f"[in:GET_WEATHER [sl:LOCATION {w('loc')} ] [sl:DATE_TIME {w('time')} ] ]"),
    (13, lambda: f"[in:GET_WEATHER [sl:LOCATION {w('loc')} ] ]"),
    (10, lambda: f"[in:GET_WEATHER [sl:DATE_TIME {w('time')} ] ]"),
    (6,  lambda: "[in:GET_WEATHER ]"),
    (7,  lambda: f"[in:GET_WEATHER [sl:WEATHER_ATTRIBUTE {w('attr')} ] [sl:DATE_TIME {w('time')} ] ]"),
    (25, lambda: f"[in:CREATE_REMINDER [sl:PERSON_REMINDED {w('person')} ] [sl:TODO {w('todo')} ] [sl:DATE_TIME {w('time')} ] ]"),
    (10, lambda: f"[in:CREATE_REMINDER [sl:TODO {w('todo')} ] ]"),
    (9,  lambda: f"[in:GET_REMINDER [sl:DATE_TIME {w('time')} ] ]"),
    (15, lambda: f"[in:CREATE_ALARM [sl:DATE_TIME {w('time')} ] ]"),
    (9,  lambda: f"[in:CREATE_ALARM [sl:ALARM_NAME {w('name')} ] [sl:DATE_TIME {w('time')} ] ]"),
    (7,  lambda: f"[in:DELETE_ALARM [sl:ALARM_NAME {w('name')} ] ]"),
    (5,  lambda: "[in:GET_ALARM ]"),
    (13, lambda: f"[in:GET_DIRECTIONS [sl:DESTINATION [in:GET_EVENT [sl:NAME_EVENT {w('event')} ] ] ] ]"),
    (7,  lambda: f"[in:GET_DIRECTIONS [sl:DESTINATION [in:GET_LOCATION_HOME [sl:CONTACT {w('contact')} ] ] ] ]"),
    (7,  lambda: f"[in:GET_ESTIMATED_ARRIVAL [sl:DESTINATION {w('loc')} ] [sl:DATE_TIME_DEPARTURE {w('time')} ] ]"),
    (11, lambda: f"[in:PLAY_MUSIC [sl:MUSIC_ARTIST_NAME {w('artist')} ] ]"),
    (6,  lambda: f"[in:PLAY_MUSIC [sl:MUSIC_TRACK_TITLE {w('track')} ] [sl:MUSIC_ARTIST_NAME {w('artist')} ] ]"),
    (9,  lambda: f"[in:SEND_MESSAGE [sl:RECIPIENT {w('recipient')} ] [sl:CONTENT_EXACT {w('content')} ] ]"),
    (6,  lambda: f"[in:CREATE_TIMER [sl:DATE_TIME {w('time')} ] ]"),
    (4,  lambda: "[in:PAUSE_TIMER ]"),
]

# Coverable lines reuse train shapes; the "reordered" lines need placeholder
# patterns only sampling tends to emit; the "novel label" lines are true OOV.
TEST_LINES = (
    [lambda: f"[in:GET_WEATHER [sl:LOCATION {w('loc')} ] [sl:DATE_TIME {w('time')} ] ]"] * 14
    + [lambda: f"[in:CREATE_REMINDER [sl:PERSON_REMINDED {w('person')} ] [sl:TODO {w('todo')} ] [sl:DATE_TIME {w('time')} ] ]"] * 10
    + [lambda: f"[in:CREATE_ALARM [sl:DATE_TIME {w('time')} ] ]"] * 8
    + [lambda: f"[in:PLAY_MUSIC [sl:MUSIC_ARTIST_NAME {w('artist')} ] ]"] * 6
    + [lambda: f"[in:GET_DIRECTIONS [sl:DESTINATION [in:GET_EVENT [sl:NAME_EVENT {w('event')} ] ] ] ]"] * 5
    + [lambda: f"[in:SEND_MESSAGE [sl:RECIPIENT {w('recipient')} ] [sl:CONTENT_EXACT {w('content')} ] ]"] * 4
    # Reordered / recombined children of known labels.
    + [lambda: f"[in:GET_WEATHER [sl:DATE_TIME {w('time')} ] [sl:LOCATION {w('loc')} ] ]"] * 4
    + [lambda: f"[in:CREATE_REMINDER [sl:TODO {w('todo')} ] [sl:PERSON_REMINDED {w('person')} ] [sl:DATE_TIME {w('time')} ] ]"] * 3
    + [lambda: f"[in:CREATE_ALARM [sl:DATE_TIME {w('time')} ] [sl:ALARM_NAME {w('name')} ] ]"] * 2
    + [lambda: f"[in:GET_ESTIMATED_ARRIVAL [sl:DATE_TIME_DEPARTURE {w('time')} ] [sl:DESTINATION {w('loc')} ] ]"] * 2
    # Labels absent from the train split.
    + [lambda: f"[in:SNOOZE_ALARM [sl:DATE_TIME {w('time')} ] ]"] * 1
    + [lambda: f"[in:GET_SUNRISE [sl:LOCATION {w('loc')} ] ]"] * 1
)

UTTERANCES = [
    "whats the weather", "remind me please", "set an alarm", "play some music",
    "directions please", "message for you", "timer request", "check my reminders",
    "wake me up", "is it going to rain",
]


def utterance():
    return rng.choice(UTTERANCES)


def main():
    pool = []
    for weight, tmpl in TRAIN_TEMPLATES:
        for _ in range(weight):
            pool.append(tmpl())
    rng.shuffle(pool)
    assert len(pool) >= 200, len(pool)
    with open("topfix_train.tsv", "w") as f:
        for form in pool[:200]:
            f.write(f"{utterance()}\t{form}\n")

    lines = [make() for make in TEST_LINES]
    rng.shuffle(lines)
    with open("topfix_test.tsv", "w") as f:
        for form in lines:
            f.write(f"{utterance()}\t{form}\n")


if __name__ == "__main__":
    main()
