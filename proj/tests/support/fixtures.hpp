#pragma once

#include <string>

#include "lak/catalog.hpp"

namespace lak::test {

// A record satisfying every range and both sum identities.
inline catalog::StudentRecord sample_record(const std::string& id = "s0001", const std::string& semester = "2017-1") {
  catalog::StudentRecord r;
  r.student_id = id;
  r.gpa = 3.5;
  r.major = "CS";
  r.passed_hours = 60;
  r.absence_rate = 0.1;
  r.quiz_5 = 4.5;
  r.mid1_15 = 12;
  r.mid2_20 = 16;
  r.tutorial_2 = 2;
  r.homework_3 = 2.5;
  r.lecture_total_45 = 37;
  r.lab_total_10 = 8;
  r.final_lab_5 = 4;
  r.final_exam = 31;
  r.total_100 = 80;
  r.grade = "B";
  r.status = 0;
  r.semester = semester;
  return r;
}

}  // namespace lak::test
