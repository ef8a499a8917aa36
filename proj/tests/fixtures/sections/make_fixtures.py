"""Builds the section-extraction corpus.

Each paper is assembled from known section bodies, so the expected sections
are the bodies themselves rather than anything the extractor produced.
Run from this directory: python3 make_fixtures.py
"""
import json

ABS = "We study the effect of sentence length on extractive summaries. Longer sentences carry more content words and win more often."
INTRO = ("Extractive summarizers copy sentences from the source text.\n"
         "Introduction of new scoring rules is the usual way to improve them, and in conclusion\n"
         "most rules reward frequent words.")
CONC = "Sentence length explains most of the gain. Normalizing by length closes the gap between methods."
METHOD = "Each sentence receives the sum of its word weights."
REFS = "[1] A. Author. A paper. 2001."

cases = []


def case(name, parts, expected, crlf=False):
    text = "\n".join(parts) + "\n"
    if crlf:
        text = text.replace("\n", "\r\n")
    cases.append((name, text, expected))


case("01_numbered_arabic",
     ["Length Effects in Extractive Summaries", "Ana Lima, Bo Park", "", "Abstract", ABS, "",
      "1. Introduction", INTRO, "", "2. Method", METHOD, "", "5. Conclusion", CONC, "", "References", REFS],
     {"abstract": ABS, "introduction": INTRO, "conclusion": CONC})

case("02_unnumbered_titlecase",
     ["Length Effects", "Ana Lima", "", "Abstract", ABS, "", "Introduction", INTRO, "", "Conclusion", CONC,
      "", "Bibliography", REFS],
     {"abstract": ABS, "introduction": INTRO, "conclusion": CONC})

case("03_roman_uppercase",
     ["LENGTH EFFECTS IN EXTRACTIVE SUMMARIES", "Ana Lima and Bo Park", "", "ABSTRACT", ABS, "",
      "I. INTRODUCTION", INTRO, "", "II. APPROACH", METHOD, "", "VI. CONCLUSION", CONC, "", "REFERENCES", REFS],
     {"abstract": ABS, "introduction": INTRO, "conclusion": CONC})

case("04_conclusion_at_eof",
     ["Length Effects", "Ana Lima", "", "Abstract", ABS, "", "1 Introduction", INTRO, "", "4 Conclusions", CONC],
     {"abstract": ABS, "introduction": INTRO, "conclusion": CONC})

case("05_missing_conclusion",
     ["Length Effects", "Ana Lima", "", "Abstract", ABS, "", "1. Introduction", INTRO, "", "2. Method", METHOD,
      "", "References", REFS],
     {"abstract": ABS, "introduction": INTRO, "conclusion": None})

case("06_inline_ieee_abstract",
     ["Length Effects", "Ana Lima", "", "Abstract—" + ABS, "", "I. INTRODUCTION", INTRO, "",
      "V. CONCLUSION", CONC, "", "REFERENCES", REFS],
     {"abstract": ABS, "introduction": INTRO, "conclusion": CONC})

case("07_future_work_then_acknowledgments",
     ["Length Effects", "Ana Lima", "", "Abstract", ABS, "", "1. Introduction", INTRO, "",
      "6. Conclusions and Future Work", CONC, "", "Acknowledgments", "We thank our colleagues.", "",
      "References", REFS],
     {"abstract": ABS, "introduction": INTRO, "conclusion": CONC})

case("08_concluding_remarks_no_dot",
     ["Length Effects", "Ana Lima", "", "Abstract", ABS, "", "1 Introduction", INTRO, "", "3 Experiments",
      METHOD, "", "7 Concluding Remarks", CONC, "", "Acknowledgements", "Funded by a grant."],
     {"abstract": ABS, "introduction": INTRO, "conclusion": CONC})

case("09_no_introduction",
     ["Length Effects", "Ana Lima", "", "Abstract", ABS, "", "2. Method", METHOD, "", "3. Conclusion", CONC],
     {"abstract": ABS, "introduction": None, "conclusion": CONC})

case("10_parenthesis_numbering",
     ["Length Effects", "Ana Lima", "", "Abstract:", ABS, "", "1) Introduction", INTRO, "", "4) Conclusion",
      CONC, "", "References", REFS],
     {"abstract": ABS, "introduction": INTRO, "conclusion": CONC})

case("11_crlf_line_endings",
     ["Length Effects", "Ana Lima", "", "Abstract", ABS, "", "1. Introduction", INTRO, "", "5. Conclusion", CONC,
      "", "References", REFS],
     {"abstract": ABS, "introduction": INTRO, "conclusion": CONC}, crlf=True)

case("12_headingless",
     ["Length Effects", "Ana Lima", "", ABS, INTRO, CONC],
     {"abstract": None, "introduction": None, "conclusion": None})

case("13_subsections_inside_intro",
     ["Length Effects", "Ana Lima", "", "Abstract", ABS, "", "1. Introduction", INTRO, "",
      "1.1 Contributions", METHOD, "", "8. Conclusion", CONC],
     {"abstract": ABS, "introduction": INTRO, "conclusion": CONC})

for name, text, expected in cases:
    with open(name + ".txt", "w", encoding="utf-8", newline="") as f:
        f.write(text)
    with open(name + ".golden.json", "w", encoding="utf-8") as f:
        json.dump(expected, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
print(len(cases), "fixtures")
