/**
 * Console UI strings for en (English), ku (Kurdish Sorani), ar (Arabic).
 * Fallback: English. Arabic and Kurdish Sorani render right-to-left.
 */

export type UiLang = "en" | "ku" | "ar";

export type UiKey =
  | "app.title"
  | "login.username"
  | "login.password"
  | "login.submit"
  | "login.failed"
  | "board.empty"
  | "board.patient"
  | "board.hospital"
  | "board.state"
  | "board.unit"
  | "board.requested"
  | "detail.title"
  | "detail.patientName"
  | "detail.requestTime"
  | "detail.receivedTime"
  | "detail.lat"
  | "detail.lon"
  | "detail.hospitalName"
  | "detail.state"
  | "action.assign"
  | "action.complete"
  | "action.cancel"
  | `state.${string}`;

const STRINGS: Record<UiLang, Record<string, string>> = {
  en: {
    "app.title": "Emergency Management Console",
    "login.username": "Username",
    "login.password": "Password",
    "login.submit": "Sign in",
    "login.failed": "Sign-in failed",
    "board.empty": "No open help requests",
    "board.patient": "Patient",
    "board.hospital": "Hospital",
    "board.state": "State",
    "board.unit": "Unit",
    "board.requested": "Requested",
    "detail.title": "Request details",
    "detail.patientName": "Patient name",
    "detail.requestTime": "Request time",
    "detail.receivedTime": "Received time",
    "detail.lat": "Latitude",
    "detail.lon": "Longitude",
    "detail.hospitalName": "Hospital",
    "detail.state": "State",
    "action.assign": "Assign unit",
    "action.complete": "Complete",
    "action.cancel": "Cancel",
    "state.received": "Received",
    "state.located": "Located",
    "state.dispatched": "Dispatched",
    "state.complete": "Complete",
    "state.cancelled": "Cancelled",
  },
  ku: {
    "app.title": "کۆنسۆڵی بەڕێوەبردنی فریاکەوتن",
    "login.username": "ناوی بەکارهێنەر",
    "login.password": "وشەی نهێنی",
    "login.submit": "چوونەژوورەوە",
    "login.failed": "چوونەژوورەوە سەرکەوتوو نەبوو",
    "board.empty": "هیچ داواکاریەکی کراوەی فریاکەوتن نییە",
    "board.patient": "نەخۆش",
    "board.hospital": "نەخۆشخانە",
    "board.state": "دۆخ",
    "board.unit": "یەکە",
    "board.requested": "کاتی داواکاری",
    "detail.title": "وردەکاری داواکاری",
    "detail.patientName": "ناوی نەخۆش",
    "detail.requestTime": "کاتی داواکاری",
    "detail.receivedTime": "کاتی گەیشتن",
    "detail.lat": "پانی",
    "detail.lon": "درێژی",
    "detail.hospitalName": "نەخۆشخانە",
    "detail.state": "دۆخ",
    "action.assign": "دیاریکردنی یەکە",
    "action.complete": "تەواوکردن",
    "action.cancel": "هەڵوەشاندنەوە",
    "state.received": "گەیشت",
    "state.located": "شوێن دیاریکرا",
    "state.dispatched": "نێردرا",
    "state.complete": "تەواو بوو",
    "state.cancelled": "هەڵوەشایەوە",
  },
  ar: {
    "app.title": "وحدة إدارة الطوارئ",
    "login.username": "اسم المستخدم",
    "login.password": "كلمة المرور",
    "login.submit": "تسجيل الدخول",
    "login.failed": "فشل تسجيل الدخول",
    "board.empty": "لا توجد طلبات نجدة مفتوحة",
    "board.patient": "المريضة",
    "board.hospital": "المستشفى",
    "board.state": "الحالة",
    "board.unit": "الوحدة",
    "board.requested": "وقت الطلب",
    "detail.title": "تفاصيل الطلب",
    "detail.patientName": "اسم المريضة",
    "detail.requestTime": "وقت الطلب",
    "detail.receivedTime": "وقت الاستلام",
    "detail.lat": "خط العرض",
    "detail.lon": "خط الطول",
    "detail.hospitalName": "المستشفى",
    "detail.state": "الحالة",
    "action.assign": "إسناد وحدة",
    "action.complete": "إنهاء",
    "action.cancel": "إلغاء",
    "state.received": "مستلم",
    "state.located": "تم تحديد الموقع",
    "state.dispatched": "تم الإرسال",
    "state.complete": "منجز",
    "state.cancelled": "ملغى",
  },
};

export function t(lang: UiLang, key: UiKey): string {
  return STRINGS[lang][key] ?? STRINGS.en[key] ?? key;
}

/** Arabic script languages render right-to-left. */
export function isRTL(lang: UiLang): boolean {
  return lang === "ar" || lang === "ku";
}

export function dirAttribute(lang: UiLang): "ltr" | "rtl" {
  return isRTL(lang) ? "rtl" : "ltr";
}
