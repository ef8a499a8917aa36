#include <gtest/gtest.h>

#include <json.hpp>

#include "litrev/docextract.hpp"
#include "litrev/error.hpp"
#include "litrev/pdf_text.hpp"
#include "test_support.hpp"

using namespace litrev;
using namespace litrev::testkit;
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> section_fixtures() {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(fixture_path("sections")))
    if (entry.path().extension() == ".txt") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> golden(const nlohmann::json& j, const char* key) {
  if (j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

}  // namespace

TEST(LoadDocument, TextPassthrough) {
  auto doc = document_from_bytes("hello", DocumentKind::text, "mem");
  EXPECT_EQ(doc.full_text, "hello");
  EXPECT_EQ(doc.origin, "mem");
}

TEST(LoadDocument, EmptyAndMissingFilesAreIoErrors) {
  auto dir = temp_dir("empty");
  { std::ofstream(dir / "empty.txt"); }
  try {
    load_document(dir / "empty.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
  try {
    load_document(dir / "missing.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

TEST(LoadDocument, ControlCharactersStrippedLatin1Decoded) {
  auto doc = document_from_bytes(std::string("a\x01" "b\r\nc\td\x7f"), DocumentKind::text, "mem");
  EXPECT_EQ(doc.full_text, "ab\nc\td");
  auto latin = document_from_bytes("caf\xE9", DocumentKind::text, "mem");
  EXPECT_EQ(latin.full_text, "caf\xC3\xA9");
}

TEST(LoadDocument, PdfFixtureMatchesGoldenText) {
  auto path = fixture_path("pdf/two_page_paper.pdf");
  EXPECT_EQ(guess_kind(path.filename().string(), read_text(path)), DocumentKind::pdf);
  auto doc = load_document(path);
  EXPECT_EQ(doc.full_text, read_text(fixture_path("pdf/two_page_paper.golden.txt")));

  // Independent of the frozen golden: every drawn line appears, in drawing order.
  std::istringstream lines(read_text(fixture_path("pdf/two_page_paper.lines.txt")));
  std::size_t pos = 0;
  for (std::string line; std::getline(lines, line);) {
    auto found = doc.full_text.find(line, pos);
    ASSERT_NE(found, std::string::npos) << line;
    pos = found + line.size();
  }
}

TEST(LoadDocument, PdfSectionsExtracted) {
  auto doc = load_document(fixture_path("pdf/two_page_paper.pdf"));
  auto sections = extract_sections(doc.full_text);
  ASSERT_TRUE(sections.conclusion);
  EXPECT_EQ(*sections.conclusion,
            "Section-aware sparse attention matches dense attention at a third of the cost.\n"
            "Future work will learn the section boundaries directly from layout.");
  ASSERT_TRUE(sections.introduction);
  EXPECT_EQ(*sections.introduction,
            "Scientific papers are long and highly structured.\nTheir sections give natural units for attention.");
}

TEST(LoadDocument, PdfWithoutTextIsExtractionError) {
  EXPECT_TRUE(looks_like_pdf("%PDF-1.4\n"));
  const std::string no_text =
      "%PDF-1.4\n1 0 obj << /Type /Catalog /Pages 2 0 R >> endobj\n"
      "2 0 obj << /Type /Pages /Kids [3 0 R] /Count 1 >> endobj\n"
      "3 0 obj << /Type /Page /Parent 2 0 R /MediaBox [0 0 10 10] /Contents 4 0 R >> endobj\n"
      "4 0 obj << /Length 10 >> stream\n0 0 m 1 1 l\nendstream endobj\ntrailer << /Root 1 0 R >>\n%%EOF\n";
  try {
    document_from_bytes(no_text, DocumentKind::pdf, "scan.pdf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::extraction);
    EXPECT_NE(std::string(e.what()).find("OCR"), std::string::npos);
  }
}

TEST(DetectHeadings, RomanConclusion) {
  auto h = detect_headings("V. CONCLUSION\nWe are done.");
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].kind, SectionKind::conclusion);
  EXPECT_EQ(h[0].text, "V. CONCLUSION");
  EXPECT_EQ(h[0].span, (ByteSpan{0, 13}));
}

TEST(DetectHeadings, KeywordInsideProseIsNotAHeading) {
  EXPECT_TRUE(detect_headings("In conclusion, we show that it works.").empty());
  EXPECT_TRUE(detect_headings("Introduction of new rules is common").empty());
  EXPECT_TRUE(detect_headings("").empty());
}

TEST(DetectHeadings, KeywordVariants) {
  for (const char* line : {"Abstract", "ABSTRACT", "1. Introduction", "1 Introduction", "IV. Conclusions",
                           "6 Conclusion and Future Work", "Conclusions and future works", "7. Concluding Remarks",
                           "References", "Bibliography", "Acknowledgments", "Acknowledgement", "iv. conclusion",
                           "2) Introduction", "Conclusion:"}) {
    auto h = detect_headings(line);
    ASSERT_EQ(h.size(), 1u) << line;
    EXPECT_NE(h[0].kind, SectionKind::other) << line;
  }
}

TEST(DetectHeadings, LongLinesAreIgnored) {
  std::string line = "1. Introduction";
  line += std::string(80, ' ') + "x";
  EXPECT_TRUE(detect_headings(line).empty());
}

TEST(DetectHeadings, BodyHeadingsBoundSections) {
  auto h = detect_headings("2. Related Work\nRELATED WORK\n4.1 Ablation Study\n1. We propose a method.\nA cat.");
  ASSERT_EQ(h.size(), 3u);
  for (const auto& x : h) EXPECT_EQ(x.kind, SectionKind::other);
}

TEST(ExtractSection, GoldenCorpus) {
  auto fixtures = section_fixtures();
  ASSERT_GE(fixtures.size(), 10u);
  for (const auto& path : fixtures) {
    SCOPED_TRACE(path.filename().string());
    auto doc = load_document(path);
    auto expected = nlohmann::json::parse(read_text(fs::path(path).replace_extension(".golden.json")));
    auto sections = extract_sections(doc.full_text);
    EXPECT_EQ(sections.abstract, golden(expected, "abstract"));
    EXPECT_EQ(sections.introduction, golden(expected, "introduction"));
    EXPECT_EQ(sections.conclusion, golden(expected, "conclusion"));
  }
}

TEST(ExtractSection, SubstringFidelityAndDisjointness) {
  for (const auto& path : section_fixtures()) {
    SCOPED_TRACE(path.filename().string());
    auto doc = load_document(path);
    auto sections = extract_sections(doc.full_text);
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (const auto* s : {&sections.abstract, &sections.introduction, &sections.conclusion}) {
      if (!*s) continue;
      auto at = doc.full_text.find(**s);
      ASSERT_NE(at, std::string::npos);
      ranges.emplace_back(at, at + (*s)->size());
    }
    std::sort(ranges.begin(), ranges.end());
    for (std::size_t i = 1; i < ranges.size(); ++i) EXPECT_LE(ranges[i - 1].second, ranges[i].first);

    std::size_t last = 0;
    for (const auto& h : sections.headings) {
      EXPECT_GE(h.span.start, last);
      EXPECT_LT(h.span.start, h.span.end);
      last = h.span.end;
    }
  }
}

TEST(ExtractAic, JoinsFoundSectionsInFixedOrder) {
  auto doc = load_document(fixture_path("sections/01_numbered_arabic.txt"));
  auto expected = nlohmann::json::parse(read_text(fixture_path("sections/01_numbered_arabic.golden.json")));
  EXPECT_EQ(extract_aic(doc), expected["abstract"].get<std::string>() + "\n\n" +
                                  expected["introduction"].get<std::string>() + "\n\n" +
                                  expected["conclusion"].get<std::string>());

  auto only_conclusion = document_from_bytes("Title\n\nConclusion\nIt ends here.\n", DocumentKind::text, "m");
  EXPECT_EQ(extract_aic(only_conclusion), "It ends here.");

  auto headingless = document_from_bytes("Just some text. Nothing more.", DocumentKind::text, "m");
  EXPECT_EQ(extract_aic(headingless), headingless.full_text);
}

TEST(ExtractAic, OrderIndependentOfDocumentOrder) {
  auto doc = document_from_bytes("T\n\nConclusion\nC body.\n\nIntroduction\nI body.\n\nAbstract\nA body.\n",
                                 DocumentKind::text, "m");
  EXPECT_EQ(extract_aic(doc), "A body.\n\nI body.\n\nC body.");
}

TEST(HeuristicMetadata, TitleAndFirstAuthor) {
  auto doc = load_document(fixture_path("papers/alvarez_sentence_ranking.txt"));
  auto meta = heuristic_metadata(doc);
  EXPECT_EQ(meta.title, "Frequency-Based Sentence Ranking for Scientific Summaries");
  EXPECT_EQ(meta.first_author, "Maria Alvarez");
  EXPECT_EQ(meta.surname(), "Alvarez");
  EXPECT_EQ(meta.source, MetadataSource::heuristic);

  auto okafor = heuristic_metadata(load_document(fixture_path("papers/okafor_retrieval_prompting.txt")));
  EXPECT_EQ(okafor.surname(), "Okafor");

  auto marked = heuristic_metadata(document_from_bytes("T\nJane Roe1*, X Y\n", DocumentKind::text, "m"));
  EXPECT_EQ(marked.first_author, "Jane Roe");

  auto no_author = heuristic_metadata(document_from_bytes("A Title\nAbstract\nBody.", DocumentKind::text, "m"));
  EXPECT_EQ(no_author.first_author, "");
}

TEST(PaperMetadata, Surname) {
  PaperMetadata m;
  m.first_author = "Ferreira, Lucia";
  EXPECT_EQ(m.surname(), "Ferreira");
  m.first_author = "Lucia Ferreira";
  EXPECT_EQ(m.surname(), "Ferreira");
  m.first_author = "";
  EXPECT_EQ(m.surname(), "");
}
