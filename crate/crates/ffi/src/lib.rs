//! C ABI over the deterministic core: label adjudication, completion
//! parsing, request fingerprinting, classification metrics, and McNemar
//! significance testing. Handles are opaque; every call returns a status
//! code and writes results through out-parameters. Strings returned by
//! this library are owned by the caller and must be released with
//! `psp_string_free`.

use std::ffi::{c_char, CStr, CString};

use presuppose::evaldata::{evaluate, mcnemar_from_counts, DatasetInstance, EvalReport, Split};
use presuppose::llm::{fingerprint, CompletionRequest, GenerationParams};
use presuppose::prompts::{parse_enumeration, parse_yes_no};
use presuppose::types::{adjudicate, AtomicAssumption, Corpus, Label};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PspStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An input that must be non-empty was empty.
    EmptyInput = 3,
    /// The text could not be parsed (yes/no verdict or enumeration).
    ParseError = 4,
    /// A label code other than 0 or 1 was supplied.
    InvalidLabel = 5,
}

/// Which route produced a McNemar p-value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PspMcnemarMethod {
    Exact = 0,
    Chi2 = 1,
}

/// McNemar test result over discordant counts b and c.
#[repr(C)]
pub struct PspMcnemar {
    pub b: u64,
    pub c: u64,
    pub p_value: f64,
    pub method: PspMcnemarMethod,
}

/// Opaque classification report; read it through the psp_eval_report_*
/// getters and release it with psp_eval_report_free.
pub struct PspEvalReport(EvalReport);

/// Opaque parsed assumption list; index it with psp_assumption_list_* and
/// release it with psp_assumption_list_free.
pub struct PspAssumptionList(Vec<AtomicAssumption>);

fn label_from_code(code: i32) -> Result<Label, PspStatus> {
    match code {
        0 => Ok(Label::HasFalseAssumption),
        1 => Ok(Label::AllValid),
        _ => Err(PspStatus::InvalidLabel),
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, PspStatus> {
    if ptr.is_null() {
        return Err(PspStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| PspStatus::InvalidUtf8)
}

fn owned_c_string(text: &str) -> *mut c_char {
    match CString::new(text) {
        Ok(s) => s.into_raw(),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn psp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a psp_* function and not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn psp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Combine per-assumption labels (codes 0/1) into a question-level label:
/// 1 only if every element is 1. An empty list is a contract violation.
///
/// # Safety
/// `labels` must point to `len` readable i32 values; `out_label` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn psp_adjudicate(
    labels: *const i32,
    len: usize,
    out_label: *mut i32,
) -> PspStatus {
    if labels.is_null() || out_label.is_null() {
        return PspStatus::NullArgument;
    }
    if len == 0 {
        return PspStatus::EmptyInput;
    }
    let slice = std::slice::from_raw_parts(labels, len);
    let mut parsed = Vec::with_capacity(len);
    for code in slice {
        match label_from_code(*code) {
            Ok(label) => parsed.push(label),
            Err(status) => return status,
        }
    }
    match adjudicate(&parsed) {
        Ok(label) => {
            *out_label = label.code() as i32;
            PspStatus::Ok
        }
        Err(_) => PspStatus::EmptyInput,
    }
}

/// Parse a yes/no completion: "Yes" means label 0 (has false assumptions),
/// "No" means label 1. Anything else is a parse error.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out_label` writable.
#[no_mangle]
pub unsafe extern "C" fn psp_parse_yes_no(text: *const c_char, out_label: *mut i32) -> PspStatus {
    if out_label.is_null() {
        return PspStatus::NullArgument;
    }
    let text = match str_arg(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_yes_no(text) {
        Ok(label) => {
            *out_label = label.code() as i32;
            PspStatus::Ok
        }
        Err(_) => PspStatus::ParseError,
    }
}

/// Parse an enumerated assumption list ("(1) ...", "2. ...", "3) ...").
/// On success writes an owned handle to `out_list`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out_list` writable.
#[no_mangle]
pub unsafe extern "C" fn psp_parse_enumeration(
    text: *const c_char,
    out_list: *mut *mut PspAssumptionList,
) -> PspStatus {
    if out_list.is_null() {
        return PspStatus::NullArgument;
    }
    let text = match str_arg(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_enumeration(text, "ffi") {
        Ok(items) => {
            *out_list = Box::into_raw(Box::new(PspAssumptionList(items)));
            PspStatus::Ok
        }
        Err(_) => PspStatus::ParseError,
    }
}

/// Number of assumptions in a parsed list.
///
/// # Safety
/// `list` must be a live handle from psp_parse_enumeration.
#[no_mangle]
pub unsafe extern "C" fn psp_assumption_list_len(list: *const PspAssumptionList) -> usize {
    let Some(list) = list.as_ref() else { return 0 };
    list.0.len()
}

/// Copy of the index-th assumption text (0-based); free with
/// psp_string_free. Null when the index is out of range.
///
/// # Safety
/// `list` must be a live handle from psp_parse_enumeration.
#[no_mangle]
pub unsafe extern "C" fn psp_assumption_list_text(
    list: *const PspAssumptionList,
    index: usize,
) -> *mut c_char {
    let Some(list) = list.as_ref() else { return std::ptr::null_mut() };
    match list.0.get(index) {
        Some(item) => owned_c_string(&item.text),
        None => std::ptr::null_mut(),
    }
}

/// Release a handle from psp_parse_enumeration.
///
/// # Safety
/// `list` must be a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn psp_assumption_list_free(list: *mut PspAssumptionList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Stable hex fingerprint of a completion request, the key used by the
/// response cache and mock scripts; free with psp_string_free. Null when
/// an argument is null or not UTF-8.
///
/// # Safety
/// String arguments must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn psp_fingerprint(
    model_id: *const c_char,
    temperature: f64,
    top_p: f64,
    frequency_penalty: f64,
    max_tokens: u32,
    system_text: *const c_char,
    user_text: *const c_char,
) -> *mut c_char {
    let (Ok(model_id), Ok(system_text), Ok(user_text)) =
        (str_arg(model_id), str_arg(system_text), str_arg(user_text))
    else {
        return std::ptr::null_mut();
    };
    let request = CompletionRequest {
        model_id: model_id.to_string(),
        system_text: system_text.to_string(),
        user_text: user_text.to_string(),
        params: GenerationParams { temperature, top_p, frequency_penalty, max_tokens },
    };
    owned_c_string(&fingerprint(&request))
}

/// McNemar's test from discordant counts: exact two-sided binomial for
/// b + c <= 25, chi-square with continuity correction above.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psp_mcnemar(b: u64, c: u64, out: *mut PspMcnemar) -> PspStatus {
    if out.is_null() {
        return PspStatus::NullArgument;
    }
    let result = mcnemar_from_counts(b, c);
    *out = PspMcnemar {
        b: result.b,
        c: result.c,
        p_value: result.p_value,
        method: match result.method {
            presuppose::evaldata::McNemarMethod::Exact => PspMcnemarMethod::Exact,
            presuppose::evaldata::McNemarMethod::Chi2 => PspMcnemarMethod::Chi2,
        },
    };
    PspStatus::Ok
}

/// Score predictions against gold labels (parallel arrays of codes 0/1,
/// positive class = 0). On success writes an owned report handle.
///
/// # Safety
/// `pred_labels` and `gold_labels` must point to `len` readable i32
/// values; `out_report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psp_evaluate(
    pred_labels: *const i32,
    gold_labels: *const i32,
    len: usize,
    out_report: *mut *mut PspEvalReport,
) -> PspStatus {
    if pred_labels.is_null() || gold_labels.is_null() || out_report.is_null() {
        return PspStatus::NullArgument;
    }
    if len == 0 {
        return PspStatus::EmptyInput;
    }
    let preds = std::slice::from_raw_parts(pred_labels, len);
    let golds = std::slice::from_raw_parts(gold_labels, len);
    let mut pred_pairs = Vec::with_capacity(len);
    let mut instances = Vec::with_capacity(len);
    for (i, (pred, gold)) in preds.iter().zip(golds).enumerate() {
        let pred = match label_from_code(*pred) {
            Ok(label) => label,
            Err(status) => return status,
        };
        let gold = match label_from_code(*gold) {
            Ok(label) => label,
            Err(status) => return status,
        };
        let id = format!("i{i}");
        pred_pairs.push((id.clone(), pred));
        instances.push(DatasetInstance {
            id,
            question_text: "q?".to_string(),
            gold_label: gold,
            gold_evidence: None,
            split: Split::Test,
            corpus: Corpus::Custom,
        });
    }
    match evaluate(&pred_pairs, &instances, Corpus::Custom) {
        Ok(report) => {
            *out_report = Box::into_raw(Box::new(PspEvalReport(report)));
            PspStatus::Ok
        }
        Err(_) => PspStatus::EmptyInput,
    }
}

unsafe fn report_field(report: *const PspEvalReport, field: fn(&EvalReport) -> f64) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    field(&(*report).0)
}

/// Overall accuracy; NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle from psp_evaluate or null.
#[no_mangle]
pub unsafe extern "C" fn psp_eval_report_accuracy(report: *const PspEvalReport) -> f64 {
    report_field(report, |r| r.accuracy)
}

/// Precision of the positive class (label 0); NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle from psp_evaluate or null.
#[no_mangle]
pub unsafe extern "C" fn psp_eval_report_positive_precision(
    report: *const PspEvalReport,
) -> f64 {
    report_field(report, |r| r.positive_class.precision)
}

/// Recall of the positive class (label 0); NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle from psp_evaluate or null.
#[no_mangle]
pub unsafe extern "C" fn psp_eval_report_positive_recall(report: *const PspEvalReport) -> f64 {
    report_field(report, |r| r.positive_class.recall)
}

/// F1 of the positive class (label 0); NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle from psp_evaluate or null.
#[no_mangle]
pub unsafe extern "C" fn psp_eval_report_positive_f1(report: *const PspEvalReport) -> f64 {
    report_field(report, |r| r.positive_class.f1)
}

/// F1 of the negative class (label 1); NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle from psp_evaluate or null.
#[no_mangle]
pub unsafe extern "C" fn psp_eval_report_negative_f1(report: *const PspEvalReport) -> f64 {
    report_field(report, |r| r.negative_class.f1)
}

/// Share of false positives among errors; NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle from psp_evaluate or null.
#[no_mangle]
pub unsafe extern "C" fn psp_eval_report_fp_share(report: *const PspEvalReport) -> f64 {
    report_field(report, |r| r.fp_share)
}

/// Share of false negatives among errors; NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle from psp_evaluate or null.
#[no_mangle]
pub unsafe extern "C" fn psp_eval_report_fn_share(report: *const PspEvalReport) -> f64 {
    report_field(report, |r| r.fn_share)
}

/// Confusion counts in the order tp, fp, fn, tn.
///
/// # Safety
/// `report` must be a live handle; the four out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn psp_eval_report_confusion(
    report: *const PspEvalReport,
    out_tp: *mut u64,
    out_fp: *mut u64,
    out_fn: *mut u64,
    out_tn: *mut u64,
) -> PspStatus {
    if report.is_null() || out_tp.is_null() || out_fp.is_null() || out_fn.is_null() || out_tn.is_null()
    {
        return PspStatus::NullArgument;
    }
    let confusion = &(*report).0.confusion;
    *out_tp = confusion.tp as u64;
    *out_fp = confusion.fp as u64;
    *out_fn = confusion.fn_ as u64;
    *out_tn = confusion.tn as u64;
    PspStatus::Ok
}

/// Release a handle from psp_evaluate.
///
/// # Safety
/// `report` must be a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn psp_eval_report_free(report: *mut PspEvalReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstr(text: &str) -> CString {
        CString::new(text).unwrap()
    }

    #[test]
    fn adjudicate_over_the_boundary() {
        let labels = [1i32, 0, 1];
        let mut out = -1i32;
        let status = unsafe { psp_adjudicate(labels.as_ptr(), labels.len(), &mut out) };
        assert_eq!(status, PspStatus::Ok);
        assert_eq!(out, 0);

        let all_valid = [1i32, 1, 1, 1];
        let status = unsafe { psp_adjudicate(all_valid.as_ptr(), all_valid.len(), &mut out) };
        assert_eq!(status, PspStatus::Ok);
        assert_eq!(out, 1);

        assert_eq!(
            unsafe { psp_adjudicate(labels.as_ptr(), 0, &mut out) },
            PspStatus::EmptyInput
        );
        assert_eq!(
            unsafe { psp_adjudicate(std::ptr::null(), 1, &mut out) },
            PspStatus::NullArgument
        );
        let bad = [2i32];
        assert_eq!(
            unsafe { psp_adjudicate(bad.as_ptr(), 1, &mut out) },
            PspStatus::InvalidLabel
        );
    }

    #[test]
    fn parse_yes_no_over_the_boundary() {
        let mut out = -1i32;
        let yes = cstr("Yes");
        assert_eq!(unsafe { psp_parse_yes_no(yes.as_ptr(), &mut out) }, PspStatus::Ok);
        assert_eq!(out, 0);
        let no = cstr(" no.");
        assert_eq!(unsafe { psp_parse_yes_no(no.as_ptr(), &mut out) }, PspStatus::Ok);
        assert_eq!(out, 1);
        let maybe = cstr("Maybe");
        assert_eq!(unsafe { psp_parse_yes_no(maybe.as_ptr(), &mut out) }, PspStatus::ParseError);
    }

    #[test]
    fn enumeration_list_handle_round_trip() {
        let text = cstr("(1) Pencils were once made using lead.\n(2) Pencils no longer contain lead.");
        let mut list: *mut PspAssumptionList = std::ptr::null_mut();
        assert_eq!(unsafe { psp_parse_enumeration(text.as_ptr(), &mut list) }, PspStatus::Ok);
        assert_eq!(unsafe { psp_assumption_list_len(list) }, 2);
        let item = unsafe { psp_assumption_list_text(list, 0) };
        assert!(!item.is_null());
        let item_text = unsafe { CStr::from_ptr(item) }.to_str().unwrap().to_string();
        assert_eq!(item_text, "Pencils were once made using lead.");
        unsafe { psp_string_free(item) };
        assert!(unsafe { psp_assumption_list_text(list, 9) }.is_null());
        unsafe { psp_assumption_list_free(list) };

        let empty = cstr("no assumptions");
        let mut list: *mut PspAssumptionList = std::ptr::null_mut();
        assert_eq!(
            unsafe { psp_parse_enumeration(empty.as_ptr(), &mut list) },
            PspStatus::ParseError
        );
    }

    #[test]
    fn fingerprint_matches_library_and_params_matter() {
        let model = cstr("m");
        let system = cstr("");
        let user = cstr("hello");
        let a = unsafe {
            psp_fingerprint(model.as_ptr(), 0.1, 0.1, 0.0, 4, system.as_ptr(), user.as_ptr())
        };
        assert!(!a.is_null());
        let a_text = unsafe { CStr::from_ptr(a) }.to_str().unwrap().to_string();
        let expected = fingerprint(&CompletionRequest {
            model_id: "m".into(),
            system_text: String::new(),
            user_text: "hello".into(),
            params: GenerationParams::label_task(),
        });
        assert_eq!(a_text, expected);
        let b = unsafe {
            psp_fingerprint(model.as_ptr(), 0.2, 0.1, 0.0, 4, system.as_ptr(), user.as_ptr())
        };
        let b_text = unsafe { CStr::from_ptr(b) }.to_str().unwrap().to_string();
        assert_ne!(a_text, b_text);
        unsafe {
            psp_string_free(a);
            psp_string_free(b);
        }
    }

    #[test]
    fn mcnemar_closed_form_through_abi() {
        let mut out = PspMcnemar { b: 0, c: 0, p_value: 0.0, method: PspMcnemarMethod::Exact };
        assert_eq!(unsafe { psp_mcnemar(10, 0, &mut out) }, PspStatus::Ok);
        assert!((out.p_value - 0.001953125).abs() < 1e-9);
        assert_eq!(out.method, PspMcnemarMethod::Exact);
        assert_eq!(unsafe { psp_mcnemar(40, 20, &mut out) }, PspStatus::Ok);
        assert_eq!(out.method, PspMcnemarMethod::Chi2);
    }

    #[test]
    fn evaluate_handle_round_trip() {
        // tp=2, fp=1, fn=1, tn=1.
        let preds = [0i32, 0, 1, 0, 1];
        let golds = [0i32, 0, 0, 1, 1];
        let mut report: *mut PspEvalReport = std::ptr::null_mut();
        assert_eq!(
            unsafe { psp_evaluate(preds.as_ptr(), golds.as_ptr(), preds.len(), &mut report) },
            PspStatus::Ok
        );
        let accuracy = unsafe { psp_eval_report_accuracy(report) };
        assert!((accuracy - 0.6).abs() < 1e-12);
        let f1 = unsafe { psp_eval_report_positive_f1(report) };
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12);
        let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
        assert_eq!(
            unsafe { psp_eval_report_confusion(report, &mut tp, &mut fp, &mut fn_, &mut tn) },
            PspStatus::Ok
        );
        assert_eq!((tp, fp, fn_, tn), (2, 1, 1, 1));
        unsafe { psp_eval_report_free(report) };
    }

    #[test]
    fn version_is_a_static_string() {
        let version = unsafe { CStr::from_ptr(psp_version()) }.to_str().unwrap();
        assert_eq!(version, env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn generated_header_declares_the_surface() {
        let header_path =
            std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/presuppose.h");
        let header = std::fs::read_to_string(&header_path)
            .expect("build script generates include/presuppose.h");
        for symbol in [
            "psp_adjudicate",
            "psp_parse_yes_no",
            "psp_parse_enumeration",
            "psp_fingerprint",
            "psp_mcnemar",
            "psp_evaluate",
            "psp_eval_report_free",
            "PspStatus",
            "PspAssumptionList",
        ] {
            assert!(header.contains(symbol), "header missing {symbol}");
        }
    }
}
