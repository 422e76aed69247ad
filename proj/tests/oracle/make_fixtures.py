#!/usr/bin/env python3
# Copyright 2026 The Speaker Sense Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the shipped name tables and test corpora."""

import csv
import json
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "data"
TEST_DATA = ROOT / "tests" / "data"

MALE = """James Robert John Michael David William Richard Joseph Thomas
Christopher Charles Daniel Matthew Anthony Mark Donald Steven Andrew Paul
Joshua Kenneth Kevin Brian George Timothy Ronald Jason Edward Jeffrey Ryan
Jacob Gary Nicholas Eric Jonathan Stephen Larry Justin Scott Brandon Benjamin
Samuel Gregory Alexander Patrick Frank Raymond Jack Dennis Jerry Tyler Aaron
Jose Adam Nathan Henry Zachary Douglas Peter Kyle Noah Ethan Jeremy Walter
Christian Keith Roger Terry Austin Sean Gerald Carl Harold Dylan Arthur
Lawrence Jordan Jesse Bryan Billy Bruce Gabriel Joe Logan Alan Juan Albert
Willie Elijah Wayne Randy Vincent Mason Roy Ralph Bobby Russell Bradley
Philip Eugene""".split()

FEMALE = """Mary Patricia Jennifer Linda Elizabeth Barbara Susan Jessica Sarah
Karen Lisa Nancy Betty Sandra Margaret Ashley Kimberly Emily Donna Michelle
Carol Amanda Melissa Deborah Stephanie Dorothy Rebecca Sharon Laura Cynthia
Amy Kathleen Angela Shirley Brenda Emma Anna Pamela Nicole Samantha Katherine
Christine Helen Debra Rachel Carolyn Janet Maria Catherine Heather Diane
Olivia Julie Joyce Victoria Ruth Virginia Lauren Kelly Christina Joan Evelyn
Judith Andrea Hannah Megan Cheryl Jacqueline Martha Madison Teresa Gloria
Sara Janice Ann Kathryn Abigail Sophia Frances Jean Alice Judy Isabella Julia
Grace Amber Denise Danielle Marilyn Beverly Charlotte Natalie Theresa Diana
Brittany Doris Kayla Alexis Marie Lori""".split()

POLYSEMOUS = ["July", "Sea", "March", "Paris", "Treasure", "Oxford",
              "Romania", "Ice", "Jersey", "Navy"]
RARE = ["Makinzy", "Diyanna", "Javione", "Zamire", "Harkeem", "Jerralyn",
        "Crissi", "Monque", "Ajahar", "Dijion"]
UNKNOWN = ["Jaliyiah", "Cardelia", "Ravindr", "Josephanthony", "Tyjohn",
           "Tnaya", "Jyren", "Kashaunda", "Jaykob", "Latonnia"]
# Ordinary given names, mostly used as names: high f_ner relative to f_exact.
FILLER = """Abel Adele Agnes Alma Ansel Blanche Bertram Cecil Clara Cyril
Delia Edgar Edith Elmer Esther Flora Gideon Hazel Homer Ida Irving Lena
Lionel Mabel Milton Nell Otis Pearl Rufus Vera""".split()

RACES = {
    "white": ["Kim", "Georgia", "Joseph", "Mark", "Martin", "James",
              "William", "Barbara", "Richard", "Victoria"],
    "hispanic": ["Sofia", "Daisy", "Luis", "Manuel", "Dora", "Emilia",
                 "Minerva", "Antonio", "Oscar", "Francisco"],
    "black": ["Kenya", "Ebony", "Anderson", "Kelvin", "Dexter", "Cleveland",
              "Percy", "Mamie", "Jarvis", "Essie"],
    "asian": ["Kong", "Muhammad", "Gang", "Mai", "Chi", "Krishna", "Can",
              "Wan", "Wang", "Ferdinand"],
}
# Lower-count names per race that fall outside a top-10 selection.
RACE_EXTRA = {
    "white": ["Clifford", "Dale"],
    "hispanic": ["Guadalupe", "Rosario"],
    "black": ["Tyrone", "Latoya"],
    "asian": ["Hiroshi", "Minh"],
}
RACE_ORDER = ["white", "hispanic", "black", "asian"]


def write_frequent():
    assert len(MALE) == 100 and len(FEMALE) == 100, (len(MALE), len(FEMALE))
    assert not set(MALE) & set(FEMALE)
    with open(DATA / "frequent_names.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["name", "gender"])
        for m, fe in zip(MALE, FEMALE):
            w.writerow([m, "male"])
            w.writerow([fe, "female"])


def write_example_groups():
    rows = []
    for i, n in enumerate(POLYSEMOUS):
        rows.append((n, 5_000_000 - 250_000 * i, 40 + i))
    for i, n in enumerate(FILLER):
        rows.append((n, 60_000 - 1_500 * i, 9_000 - 200 * i))
    for i, n in enumerate(RARE):
        rows.append((n, 1 + i, i % 3))
    for n in UNKNOWN:
        rows.append((n, 0, 0))
    with open(DATA / "example_group_names.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["name", "f_exact", "f_ner"])
        for r in rows:
            w.writerow(r)


def write_races():
    with open(DATA / "race_names.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["name", "f_exact", "p_white", "p_hispanic", "p_black",
                    "p_asian"])
        for race in RACE_ORDER:
            k = RACE_ORDER.index(race)
            names = [(n, 900_000 - 40_000 * i) for i, n in enumerate(RACES[race])]
            names += [(n, 5_000 - 1_000 * i) for i, n in enumerate(RACE_EXTRA[race])]
            for i, (n, count) in enumerate(names):
                p = [0.1, 0.1, 0.1, 0.1]
                p[k] = 0.55 + 0.01 * (i % 5)
                p[(k + 1) % 4] += 0.45 - 0.01 * (i % 5) - 0.3
                w.writerow([n, count] + ["%.2f" % x for x in p])


def sample(id_, turns, reference, context=None):
    return {"id": id_,
            "dialogue": [{"speaker": s, "text": t} for s, t in turns],
            "context": context, "reference": reference}


DIALOGUES20 = [
    sample("d01", [("Amanda", "I baked cookies. Do you want some?"),
                   ("Jerry", "Sure!"),
                   ("Amanda", "I'll bring you tomorrow :-)")],
           "Amanda baked cookies and will bring Jerry some tomorrow."),
    sample("d02", [("Olivia", "Who are you voting for in this election?"),
                   ("Oliver", "Liberals as always."),
                   ("Olivia", "Me too!!"),
                   ("Oliver", "Great")],
           "Olivia and Oliver are voting for liberals in this election."),
    sample("d03", [("Tim", "Hi, what's up?"),
                   ("Kim", "Bad mood tbh, I was going to do lots of stuff but ended up procrastinating"),
                   ("Tim", "What did you plan on doing?"),
                   ("Kim", "Oh you know, uni stuff and unfucking my room"),
                   ("Tim", "Maybe try the pomodoro technique?"),
                   ("Kim", "Ok, I'll give it a try")],
           "Kim may try the pomodoro technique recommended by Tim to get more stuff done."),
    sample("d04", [("Edward", "Rachel, I think I'm in love with Bella.."),
                   ("Rachel", "Dont say anything else.."),
                   ("Edward", "What do you mean??"),
                   ("Rachel", "Open your fu**ing door.. I'm outside")],
           "Edward thinks he is in love with Bella. Rachel wants Edward to open his door. Rachel is outside."),
    sample("d05", [("Sam", "is Betty's dog still barking?"),
                   ("Naomi", "yes, all night long"),
                   ("Sam", "we should talk to Betty about it")],
           "Betty's dog kept Naomi awake all night. Sam wants to talk to Betty."),
    sample("d06", [("Neville", "Hi there, does anyone remember what date I got married on?"),
                   ("Don", "Are you serious?"),
                   ("Neville", "Dead serious. We're on vacation, and Tina's mad at me about something."),
                   ("Wyatt", "Hang on, I'll ask my wife."),
                   ("Don", "Haha, someone's in a lot of trouble :D"),
                   ("Wyatt", "September 17. I hope you remember the year ;)")],
           "Wyatt reminds Neville his wedding anniversary is on the 17th of September. Neville's wife Tina is upset."),
    sample("d07", [("John", "Ave. Was there any homework for tomorrow?"),
                   ("Cassandra", "hello :D Of course, as always :D"),
                   ("John", "What exactly?"),
                   ("Cassandra", "I'm not sure so I'll check it for you in 20minutes."),
                   ("John", "Cool, thanks. Sorry I couldn't be there, but I was busy as f**k...")],
           "John didn't show up for class today. Cassandra will check the homework for him in 20 minutes."),
    sample("d08", [("Sarah", "I found a song on youtube and I think you'll like it"),
                   ("James", "What song?"),
                   ("Sarah", "<file_other>"),
                   ("James", "Oh. I know it! I heard it before in Mark's car"),
                   ("Sarah", "Do you like it?"),
                   ("James", "Yes, it's great!")],
           "James likes the song Sarah sent him. He heard it in Mark's car."),
    sample("d09", [("Noah", "When and where are we meeting? :)"),
                   ("Madison", "I thought you were busy...?"),
                   ("Noah", "Yeah, I WAS. I quit my job."),
                   ("Madison", "No way! Why?"),
                   ("Noah", "I just felt like it. Let's meet at the park at 7.")],
           "Noah quit his job. He and Madison are meeting at the park at 7."),
    sample("d10", [("Matt", "Do you want to go for date?"),
                   ("Agnes", "Wow! You caught me out with this question Matt."),
                   ("Agnes", "Why not. Where?"),
                   ("Matt", "The restaurant on Main street, Friday at 8."),
                   ("Agnes", "Ok, see you then")],
           "Matt invites Agnes for a date on Friday at 8 at the restaurant on Main street."),
    sample("d11", [("Lucas", "Hey! How was your day?"),
                   ("Demi", "Hey there! "),
                   ("Demi", "It was pretty fine, actually, thank you!"),
                   ("Demi", "I just got promoted! :D"),
                   ("Lucas", "Whoa! Great news!"),
                   ("Lucas", "Congratulations!")],
           "Demi got promoted. Lucas congratulates her."),
    sample("d12", [("Ernest", "hey Mike, did you park your car on our street?"),
                   ("Mike", "no, took it into garage today"),
                   ("Ernest", "ok good")],
           "Mike's car is in the garage, not on Ernest's street."),
    sample("d13", [("Mary", "I need to cancel our lunch, Helen."),
                   ("Helen", "What happened?"),
                   ("Mary", "My daughter is sick."),
                   ("Helen", "Oh no, I hope she gets better soon. Let's reschedule."),
                   ("Mary", "Thanks. Next Tuesday?"),
                   ("Helen", "Works for me.")],
           "Mary cancels lunch with Helen because her daughter is sick. They reschedule for next Tuesday."),
    sample("d14", [("Laura", "ok, I'm in the taxi"),
                   ("Laura", "will be there in 15 min"),
                   ("Paul", "Great, we're waiting at the entrance")],
           "Laura is in a taxi and will arrive in 15 minutes. Paul is waiting at the entrance.",
           context="Laura and Paul are meeting at a concert."),
    sample("d15", [("Greg", "Can you pick up Peter from school today?"),
                   ("Emily", "Sure, what time?"),
                   ("Greg", "3:30. Thanks a lot!"),
                   ("Emily", "No problem")],
           "Emily will pick up Peter from school at 3:30 for Greg."),
    sample("d16", [("Frank", "Have you seen my keys?"),
                   ("Julia", "They're on the kitchen table, Frank."),
                   ("Frank", "Found them. You're a lifesaver."),
                   ("Julia", "As always ;)")],
           "Julia tells Frank his keys are on the kitchen table."),
    sample("d17", [("Anna", "Are we still going to the cinema tonight?"),
                   ("Tom", "Yes, the movie starts at 9."),
                   ("Kate", "Can I join you?"),
                   ("Anna", "Of course, Kate!"),
                   ("Tom", "I'll buy three tickets then.")],
           "Anna, Tom and Kate are going to the cinema tonight at 9. Tom will buy the tickets."),
    sample("d18", [("Henry", "The meeting is moved to Thursday."),
                   ("Catherine", "Why?"),
                   ("Henry", "The boss is away on Wednesday."),
                   ("Catherine", "OK, I'll update the calendar.")],
           "The meeting is moved to Thursday because the boss is away. Catherine will update the calendar."),
    sample("d19", [("Roy", "Did you call the plumber?"),
                   ("Joan", "Yes, he's coming tomorrow morning."),
                   ("Roy", "Good, the sink is leaking again.")],
           "Joan called the plumber, who is coming tomorrow morning to fix Roy's leaking sink."),
    sample("d20", [("Tyler", "Happy birthday, Amber!"),
                   ("Amber", "Thank you Tyler! Are you coming to the party?"),
                   ("Tyler", "Wouldn't miss it."),
                   ("Philip", "Me neither! Happy birthday :)"),
                   ("Amber", "Thanks guys, see you at 8")],
           "It's Amber's birthday. Tyler and Philip are coming to her party at 8."),
]

CORPUS3 = [
    DIALOGUES20[0],
    DIALOGUES20[4],
    DIALOGUES20[5],
]

TEMPLATES = [
    ("{a}", "Hi {b}, are you coming to {c}'s party tonight?"),
    ("{b}", "Yes! I'll bring some snacks."),
    ("{a}", "Great, {c} will be happy. Don't forget the gift."),
    ("{b}", "I won't. See you at 8, {a}."),
    ("{a}", "See you!"),
]
EXTRA_TURNS = [
    ("{c}", "Thanks {a}! Can't wait to see you both."),
    ("{b}", "{a}'s car or mine?"),
    ("{a}", "Mine, I'll pick you up."),
]
SYN_NAMES = MALE[:40] + FEMALE[:40] + ["Zoë", "José", "Anne-Marie", "O'Neil"]


def synthetic50():
    rng = random.Random(20240521)
    out = []
    for i in range(50):
        a, b, c = rng.sample(SYN_NAMES, 3)
        turns = list(TEMPLATES[: 2 + rng.randrange(4)])
        if rng.random() < 0.5:
            turns += EXTRA_TURNS[: 1 + rng.randrange(3)]
        filled = [(s.format(a=a, b=b, c=c), t.format(a=a, b=b, c=c))
                  for s, t in turns]
        ctx = None
        if rng.random() < 0.3:
            ctx = f"{a} and {b} are friends of {c}."
        ref = f"{a} asks {b} about {c}'s party. {b} is coming."
        out.append(sample(f"syn{i:02d}", filled, ref, ctx))
    return out


def write_jsonl(path, samples):
    with open(path, "w", encoding="utf-8") as f:
        for s in samples:
            f.write(json.dumps(s, ensure_ascii=False, separators=(",", ":")) + "\n")


def main():
    DATA.mkdir(exist_ok=True)
    TEST_DATA.mkdir(parents=True, exist_ok=True)
    write_frequent()
    write_example_groups()
    write_races()
    write_jsonl(TEST_DATA / "dialogues20.jsonl", DIALOGUES20)
    write_jsonl(TEST_DATA / "corpus3.jsonl", CORPUS3)
    write_jsonl(TEST_DATA / "synthetic50.jsonl", synthetic50())


if __name__ == "__main__":
    main()
