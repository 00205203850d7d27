"""Regenerate the bundled 50-row synthetic complaint export.

Usage: python scripts/make_sample_corpus.py > src/complaint_anomaly/data/sample_complaints.csv
"""

import csv
import datetime as dt
import random
import sys

OPENERS_MERIT = [
    "Someone made an unauthorized charge of {amt} on my card and it is fraud.",
    "I found a fraudulent charge of {amt} from XXXX that I never made.",
    "My card was stolen and the thief spent {amt} at XXXX.",
    "The bank made an error and charged me {amt} twice for one purchase but only one was real.",
    "I was billed {amt} for an order that was cancelled and never delivered.",
]
OPENERS_NON = [
    "I was charged a late fee of {amt} even though I paid on time.",
    "They raised my interest and now I owe {amt} more on my statement.",
    "I asked about a fee of {amt} and the representative was rude.",
    "My payment of {amt} was applied to the wrong account according to them.",
    "The annual fee of {amt} was posted without any notice.",
]
MIDDLES_MERIT = [
    "I filed a dispute right away and sent every receipt.",
    "I called the fraud department and reported the problem.",
    "This is a scam and I am very upset about it.",
    "I have been a loyal customer for years and this mistake caused me stress.",
    "The merchant admitted the error in writing.",
]
MIDDLES_NON = [
    "They denied my request and refused to reverse it.",
    "I feel this penalty is unfair and ridiculous.",
    "Customer service ignored my calls and I am frustrated.",
    "Nobody explained the terms and I am confused and angry.",
    "I think this practice is wrong and unacceptable.",
]
CLOSERS = [
    "Please fix this.",
    "I want my money back.",
    "This has been a terrible experience.",
    "I am disappointed with how this was handled.",
    "Thank you for looking into this.",
    "Thanks for your help.",
    "I hate dealing with this bank!!!",
    "Why does it take so long?",
]


def money(rng):
    cents = rng.choice(["00", "00", "50", "99", "25"])
    whole = rng.choice([25, 40, 75, 120, 170, 230, 300, 450, 750, 980, 1200, 2500, 4800])
    text = f"{whole:,}.{cents}"
    return ("{$" + text + "}") if rng.random() < 0.5 else ("$" + text)


def main(out=sys.stdout, n=50, n_merit=19, seed=7):
    rng = random.Random(seed)
    labels = [True] * n_merit + [False] * (n - n_merit)
    rng.shuffle(labels)
    start = dt.date(2012, 1, 1)
    span = (dt.date(2023, 6, 1) - start).days
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([
        "Date received", "Product", "Company", "Consumer complaint narrative",
        "Company response to consumer", "Complaint ID",
    ])
    for i, merit in enumerate(labels):
        amt = money(rng)
        opener = rng.choice(OPENERS_MERIT if merit else OPENERS_NON).format(amt=amt)
        middles = rng.sample(MIDDLES_MERIT if merit else MIDDLES_NON, k=rng.randint(1, 3))
        # a little label noise in wording keeps the classifiers honest
        if rng.random() < 0.3:
            middles.append(rng.choice(MIDDLES_NON if merit else MIDDLES_MERIT))
        narrative = " ".join([opener, *middles, rng.choice(CLOSERS)])
        if merit:
            response = rng.choice(["Closed with monetary relief", "Closed with non-monetary relief"])
        else:
            response = "Closed with explanation"
        date = start + dt.timedelta(days=rng.randrange(span))
        product = rng.choice(["Credit card", "Prepaid card", "Credit card or prepaid card"])
        writer.writerow([
            date.strftime("%m/%d/%Y"), product, "Example National Bank", narrative,
            response, str(1000 + i),
        ])


if __name__ == "__main__":
    main()
